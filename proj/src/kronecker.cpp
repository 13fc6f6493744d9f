#include "modfun/kronecker.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace modfun {

namespace {

long positive_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

bool residue_hypothesis_holds(long N, long p) {
  if (N == 1) return true;
  const long r = positive_mod(p, N);
  return r == 1 || r == positive_mod(-1, N);
}

void check_prime_level(const Subject& f, long p) {
  if (p < 2) throw DomainError("p must be a prime");
  if (f.level() > 1 && std::gcd(p, f.level()) != 1)
    throw DomainError("p divides the level");
}

// Conservative input sizing: window length in 1/(denom*p) units that leaves
// at least target certified slots after the p-th powers and the final
// product are taken.
long window_length_fine(const Subject& f, long p, long target) {
  long pole_budget;
  switch (f.kind()) {
    case Subject::Kind::J:
      pole_budget = p + 1;
      break;
    case Subject::Kind::Fricke:
      pole_budget = f.level() * (p + 1);
      break;
    case Subject::Kind::Eta: {
      long lead = f.eta_spec().leading_numerator_24() / (24 / f.natural_denom());
      pole_budget = (std::max(-lead, 1L) + f.natural_denom()) * (p + 1);
      break;
    }
    default:
      throw Error("unreachable");
  }
  return p * target + 2 * pole_budget;
}

long leading_bound_keys(const Subject& f) {
  switch (f.kind()) {
    case Subject::Kind::J:
      return -1;
    case Subject::Kind::Fricke:
      return -f.level();
    case Subject::Kind::Eta:
      return f.eta_spec().leading_numerator_24() / (24 / f.natural_denom());
  }
  throw Error("unreachable");
}

long inner_prec_keys(const Subject& f, long p, long target) {
  const long len = (window_length_fine(f, p, target) + p - 1) / p;
  return leading_bound_keys(f) + len;
}

struct EnginePair {
  QSeries e;
  QSeries ep;
};

struct Engine {
  const Subject& f;
  long p;
  long target;
  long prec;
  std::map<FrickeIndex, EnginePair> torsion;
  std::optional<EnginePair> base;

  Engine(const Subject& f_, long p_, long target_)
      : f(f_), p(p_), target(target_), prec(inner_prec_keys(f_, p_, target_)) {}

  void prefill() {
    if (f.kind() == Subject::Kind::Fricke) {
      for (const FrickeIndex& u : fricke_orbit(f.index())) {
        QSeries e = fricke_expansion(u, prec);
        if (f.scale() != 1)
          e = e.scaled(CycNumber::integer(f.scale()).embedded(e.coeff_level()));
        QSeries ep = e.pow(p);
        torsion.emplace(u, EnginePair{std::move(e), std::move(ep)});
      }
    } else {
      QSeries e = f.expansion(prec);
      QSeries ep = e.pow(p);
      base = EnginePair{std::move(e), std::move(ep)};
    }
  }

  // exact expansion of the witness product at the cusp alpha
  QSeries product_at(const Mat2& alpha, int* branch_out) const {
    const CuspBranch cb = decompose_fp_cusp(alpha, p);
    if (branch_out) *branch_out = cb.branch;
    const EnginePair* inner = nullptr;
    const EnginePair* outer = nullptr;
    if (f.kind() == Subject::Kind::Fricke) {
      inner = &torsion.at(fricke_sl2_action(f.index(), cb.gamma));
      outer = &torsion.at(galois_operand_index(f.index(), alpha, p));
    } else {
      if (f.kind() == Subject::Kind::Eta) {
        const bool minus_id =
            alpha.a == -1 && alpha.b == 0 && alpha.c == 0 && alpha.d == -1;
        if (!(alpha == mat2_identity() || minus_id))
          throw DomainError("eta quotients are checked at the identity cusp only");
      }
      inner = &*base;
      outer = &*base;
    }
    QSeries A, Ap;
    if (cb.branch == 1) {
      A = inner->e.substitute_up(p);
      Ap = inner->ep.substitute_up(p);
    } else {
      A = inner->e.twist_shift(cb.k, p);
      Ap = inner->ep.twist_shift(cb.k, p);
    }
    QSeries B, Bp;
    if (f.kind() == Subject::Kind::Fricke) {
      B = outer->e.galois_on_coeffs(p);
      Bp = outer->ep.galois_on_coeffs(p);
    } else {
      B = outer->e;
      Bp = outer->ep;
    }
    return (Ap - B) * (A - Bp);
  }

  CuspResult run_cusp(const Mat2& alpha, long report_denom) const {
    CuspResult res;
    res.alpha = alpha;
    QSeries prod = product_at(alpha, &res.branch);
    if (!prod.all_coeffs_integral())
      throw IntegralityError(
          "witness product has a non-integral coefficient at cusp " +
          alpha.to_string() + " (upstream bug)");
    if (report_denom % prod.exp_denom() != 0)
      throw Error("product lattice does not refine the reporting lattice");
    const long scale = report_denom / prod.exp_denom();
    res.window_lo = prod.low() * scale;
    res.window_hi = prod.prec() * scale;
    const mpz_class pz(p);
    res.divisible = true;
    for (const auto& [key, coeff] : prod.terms()) {
      if (!coeff.divisible_by(pz)) {
        res.divisible = false;
        std::ostringstream os;
        os << "q^(" << key * scale << "/" << report_denom
           << ") coefficient " << coeff.to_string();
        res.first_fail = os.str();
        break;
      }
    }
    if (res.divisible) res.margin = prod.min_p_power(pz);
    return res;
  }
};

void run_parallel(long count, int threads, const std::function<void(long)>& fn) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (;;) {
          const long i = next.fetch_add(1);
          if (i >= count) break;
          fn(i);
        }
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string to_string(VerifyMode mode) {
  switch (mode) {
    case VerifyMode::CuspInfinity:
      return "cusp-infinity";
    case VerifyMode::AllCosets:
      return "all-cosets";
    case VerifyMode::Sampled:
      return "sampled";
  }
  return "?";
}

QSeries congruence_witness_cusp(const Subject& f, const Mat2& alpha, long p,
                                long target_coeffs, bool allow_any_residue) {
  check_prime_level(f, p);
  if (!residue_hypothesis_holds(f.level(), p) && !allow_any_residue)
    throw HypothesisError("p = " + std::to_string(p) + " is not +-1 modulo " +
                          std::to_string(f.level()));
  Engine eng(f, p, target_coeffs);
  eng.prefill();
  return eng.product_at(alpha, nullptr);
}

QSeries congruence_witness_scaled(const Subject& f, long p, long target_coeffs) {
  check_prime_level(f, p);
  if (!residue_hypothesis_holds(f.level(), p))
    throw HypothesisError("p = " + std::to_string(p) + " is not +-1 modulo " +
                          std::to_string(f.level()));
  const long prec = inner_prec_keys(f, p, target_coeffs);
  QSeries e = f.expansion(prec);
  QSeries sigma;  // expansion of f[1 0; 0 p] at the infinite cusp
  if (f.kind() == Subject::Kind::Fricke) {
    FrickeIndex w = galois_operand_index(f.index(), mat2_identity(), p);
    sigma = fricke_expansion(w, prec).galois_on_coeffs(p);
  } else {
    sigma = e;
  }
  QSeries su = sigma.substitute_up(p);
  return (e.pow(p) - su) * (e - su.pow(p));
}

CongruenceReport verify_congruence(const Subject& f, long p, VerifyMode mode,
                                   long target_coeffs, unsigned long seed,
                                   long sample_count, bool negative_control,
                                   int threads) {
  check_prime_level(f, p);
  const long N = f.level();
  CongruenceReport rep;
  rep.subject = f.description();
  rep.N = N;
  rep.p = p;
  rep.mode = mode;
  rep.seed = seed;
  rep.precision_target = target_coeffs;
  rep.negative_control = negative_control;
  rep.hypothesis_ok = residue_hypothesis_holds(N, p);
  if (!rep.hypothesis_ok && !negative_control)
    throw HypothesisError("p = " + std::to_string(p) + " is not +-1 modulo " +
                          std::to_string(N) +
                          " (use the negative-control mode to observe anyway)");
  if (f.kind() == Subject::Kind::Eta && mode != VerifyMode::CuspInfinity)
    throw DomainError("eta quotients support the cusp-infinity mode only");

  const long Np = N * p;
  std::vector<Mat2> cosets;
  switch (mode) {
    case VerifyMode::CuspInfinity:
      cosets.push_back(mat2_identity());
      break;
    case VerifyMode::AllCosets: {
      if (sl2_order(Np) > kAllCosetsCap)
        throw DomainError("coset sweep of size " + std::to_string(sl2_order(Np)) +
                          " exceeds the cap; use sampling");
      cosets = coset_representatives(Np);
      break;
    }
    case VerifyMode::Sampled: {
      cosets.push_back(mat2_identity());
      std::mt19937_64 rng(seed);
      while (static_cast<long>(cosets.size()) < sample_count + 1) {
        long a = static_cast<long>(rng() % Np), b = static_cast<long>(rng() % Np);
        long c = static_cast<long>(rng() % Np), d = static_cast<long>(rng() % Np);
        if (positive_mod(a * d - b * c, Np) != 1) continue;
        cosets.push_back(sl2_lift(a, b, c, d, Np));
      }
      // both branches must appear: the identity covers p ∤ a; force one
      // divisible corner if the sample found none
      bool have_case1 = false;
      for (const auto& m : cosets)
        if (m.a % p == 0) have_case1 = true;
      if (!have_case1 && cosets.size() > 1) cosets.back() = Mat2{0, -1, 1, 0};
      break;
    }
  }
  rep.sample_count = static_cast<long>(cosets.size());

  Engine eng(f, p, target_coeffs);
  eng.prefill();
  const long report_denom = f.natural_denom() * p;

  std::vector<CuspResult> results(cosets.size());
  run_parallel(static_cast<long>(cosets.size()), threads, [&](long i) {
    results[static_cast<size_t>(i)] =
        eng.run_cusp(cosets[static_cast<size_t>(i)], report_denom);
  });
  rep.per_cusp = std::move(results);

  rep.certified_min = 0;
  bool all_div = true;
  bool first = true;
  for (const auto& r : rep.per_cusp) {
    const long span = r.window_hi - r.window_lo;
    if (first || span < rep.certified_min) rep.certified_min = span;
    if (r.branch == 1)
      ++rep.case1_count;
    else
      ++rep.case2_count;
    all_div &= r.divisible;
    if (r.margin && (!rep.min_margin || *r.margin < *rep.min_margin))
      rep.min_margin = r.margin;
    first = false;
  }
  if (negative_control) {
    rep.pass = true;  // observational run: completion is the outcome
  } else {
    rep.pass = all_div && rep.certified_min >= target_coeffs;
  }
  return rep;
}

std::string CongruenceReport::to_text() const {
  std::ostringstream os;
  os << "subject " << subject << ", N=" << N << ", p=" << p << ", mode "
     << modfun::to_string(mode);
  if (mode == VerifyMode::Sampled) os << " (seed " << seed << ")";
  os << "\ncusps examined: " << per_cusp.size() << " (branch 1: " << case1_count
     << ", branch 2: " << case2_count << ")";
  os << "\ncertified coefficient slots per cusp: >= " << certified_min
     << " (target " << precision_target << ")";
  long failures = 0;
  for (const auto& r : per_cusp)
    if (!r.divisible) ++failures;
  if (negative_control) {
    os << "\nnegative control (hypothesis "
       << (hypothesis_ok ? "holds" : "violated") << "): " << failures << " of "
       << per_cusp.size() << " cusps had a coefficient outside p*Z[zeta]";
    for (const auto& r : per_cusp)
      if (!r.divisible) {
        os << "\n  first at cusp " << r.alpha.to_string() << ": " << r.first_fail;
        break;
      }
  } else if (pass) {
    os << "\nall coefficients divisible by " << p << "; minimal exact p-power ";
    if (min_margin)
      os << *min_margin;
    else
      os << "infinite (vanishing products)";
    os << "\nverdict: PASS";
  } else {
    os << "\nverdict: FAIL (" << failures << " cusp(s) with a counterexample)";
    for (const auto& r : per_cusp) {
      if (!r.divisible) {
        os << "\n  cusp " << r.alpha.to_string() << " branch " << r.branch
           << ": " << r.first_fail;
      }
    }
  }
  return os.str();
}

std::string CongruenceReport::to_json_string() const {
  nlohmann::json j;
  j["subject"] = subject;
  j["N"] = N;
  j["p"] = p;
  j["mode"] = modfun::to_string(mode);
  j["seed"] = seed;
  j["sample_count"] = sample_count;
  j["precision"] = precision_target;
  j["negative_control"] = negative_control;
  j["hypothesis_ok"] = hypothesis_ok;
  j["verdict"] = negative_control ? "observed" : (pass ? "pass" : "fail");
  j["certified_min"] = certified_min;
  if (min_margin)
    j["min_margin"] = *min_margin;
  else
    j["min_margin"] = nullptr;
  j["case1"] = case1_count;
  j["case2"] = case2_count;
  nlohmann::json cusps = nlohmann::json::array();
  for (const auto& r : per_cusp) {
    nlohmann::json c;
    c["coset"] = r.alpha.to_string();
    c["branch"] = r.branch;
    c["divisible"] = r.divisible;
    if (r.margin)
      c["margin"] = *r.margin;
    else
      c["margin"] = nullptr;
    c["window"] = {r.window_lo, r.window_hi};
    if (!r.first_fail.empty()) c["first_fail"] = r.first_fail;
    cusps.push_back(std::move(c));
  }
  j["per_cusp"] = std::move(cusps);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Modular polynomials

mpz_class ModularPolynomial::coeff(long i, long k) const {
  auto it = coeffs.find({i, k});
  return it == coeffs.end() ? mpz_class(0) : it->second;
}

bool ModularPolynomial::is_symmetric() const {
  for (const auto& [ik, c] : coeffs)
    if (coeff(ik.second, ik.first) != c) return false;
  return true;
}

bool ModularPolynomial::is_monic_in_x() const {
  if (coeff(p + 1, 0) != 1) return false;
  for (const auto& [ik, c] : coeffs)
    if (ik.first == p + 1 && ik.second > 0 && c != 0) return false;
  return true;
}

std::vector<std::tuple<long, long, mpz_class>> ModularPolynomial::triples() const {
  std::vector<std::tuple<long, long, mpz_class>> out;
  out.reserve(coeffs.size());
  for (const auto& [ik, c] : coeffs)
    if (c != 0) out.emplace_back(ik.first, ik.second, c);
  return out;  // map order is already lexicographic
}

std::string ModularPolynomial::to_text() const {
  std::ostringstream os;
  bool first = true;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    const auto& [ik, c] = *it;
    if (c == 0) continue;
    mpz_class mag = abs(c);
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    first = false;
    bool unit = mag == 1;
    std::string vars;
    if (ik.first > 0) {
      vars += "x";
      if (ik.first > 1) vars += "^" + std::to_string(ik.first);
    }
    if (ik.second > 0) {
      if (!vars.empty()) vars += "*";
      vars += "y";
      if (ik.second > 1) vars += "^" + std::to_string(ik.second);
    }
    if (vars.empty()) {
      os << mag.get_str();
    } else if (unit) {
      os << vars;
    } else {
      os << mag.get_str() << "*" << vars;
    }
  }
  if (first) os << "0";
  return os.str();
}

ModularPolynomial modular_polynomial(long p, long window) {
  if (p != 2 && p != 3 && p != 5)
    throw DomainError("supported primes are 2, 3 and 5");
  if (p == 5 && window < 70)
    throw DomainError("p = 5 needs a j-series window of at least 70");
  QSeries j = j_expansion(window);
  std::vector<QSeries> roots;
  roots.push_back(j.substitute_up(p));
  for (long k = 0; k < p; ++k) roots.push_back(j.twist_shift(k, p));

  // coefficients of prod (x - r) from x^{p+1} downward
  const long kBig = 1L << 40;
  std::vector<QSeries> a;
  a.push_back(QSeries::from_terms(1, 1, 0, kBig, {{0, CycNumber::integer(1)}}));
  for (const QSeries& r : roots) {
    std::vector<QSeries> next(a.size() + 1);
    next[0] = a[0];
    for (size_t i = 1; i < a.size(); ++i) next[i] = a[i] - r * a[i - 1];
    next[a.size()] = -(r * a.back());
    a = std::move(next);
  }

  ModularPolynomial out;
  out.p = p;
  out.coeffs[{p + 1, 0}] = 1;
  long max_pole = 0;
  long max_end = 2;
  std::vector<QSeries> flat;
  for (size_t i = 1; i < a.size(); ++i) {
    // the root-of-unity parts must cancel and the exponents must be integers
    QSeries s = a[i].substitute_up(1).with_integer_exponents().with_rational_coeffs();
    if (s.leading_key() && *s.leading_key() < -max_pole) max_pole = -*s.leading_key();
    max_end = std::max(max_end, s.prec());
    flat.push_back(std::move(s));
  }
  QSeries jred = j_expansion(max_end + max_pole + 2);
  for (size_t i = 0; i < flat.size(); ++i) {
    JReduction red = reduce_to_j_polynomial(flat[i], jred);
    if (red.remainder.has_terms())
      throw Error("nonvanishing remainder while assembling the modular polynomial");
    for (long k = 0; k <= red.poly.degree(); ++k) {
      const CycNumber& c = red.poly.coeffs[static_cast<size_t>(k)];
      if (c.is_zero()) continue;
      if (!c.is_integral() || !c.is_rational())
        throw Error("non-integer coefficient in the modular polynomial");
      out.coeffs[{p + 1 - static_cast<long>(i) - 1, k}] = c.rational_value().get_num();
    }
  }
  if (!out.is_monic_in_x()) throw Error("modular polynomial is not monic");
  if (!out.is_symmetric()) throw Error("modular polynomial is not symmetric");
  long max_deg = 0;
  for (const auto& [ik, c] : out.coeffs)
    max_deg = std::max({max_deg, ik.first, ik.second});
  if (max_deg != p + 1) throw Error("modular polynomial has the wrong degree");
  return out;
}

bool kronecker_classical_check(const ModularPolynomial& Phi) {
  std::map<std::pair<long, long>, mpz_class> diff = Phi.coeffs;
  const long p = Phi.p;
  // (x^p - y)(x - y^p) = x^{p+1} - x^p y^p - x y + y^{p+1}
  diff[{p + 1, 0}] -= 1;
  diff[{p, p}] += 1;
  diff[{1, 1}] += 1;
  diff[{0, p + 1}] -= 1;
  const mpz_class pz(p);
  for (const auto& [ik, c] : diff)
    if (!mpz_divisible_p(c.get_mpz_t(), pz.get_mpz_t())) return false;
  return true;
}

}  // namespace modfun
