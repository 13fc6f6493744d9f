#include "modfun/valuation.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace modfun {

namespace {

using Poly = std::vector<mpz_class>;  // little-endian, coefficients mod m

void pm_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly pm_reduce(Poly a, const mpz_class& m) {
  for (auto& c : a) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
  pm_trim(a);
  return a;
}

Poly pm_mul(const Poly& a, const Poly& b, const mpz_class& m) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, mpz_class(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      out[i + j] += a[i] * b[j];
  }
  return pm_reduce(std::move(out), m);
}

Poly pm_add(Poly a, const Poly& b, const mpz_class& m) {
  if (a.size() < b.size()) a.resize(b.size(), mpz_class(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return pm_reduce(std::move(a), m);
}

Poly pm_sub(Poly a, const Poly& b, const mpz_class& m) {
  if (a.size() < b.size()) a.resize(b.size(), mpz_class(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return pm_reduce(std::move(a), m);
}

mpz_class mod_inverse(const mpz_class& a, const mpz_class& m) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw DomainError("non-invertible leading coefficient");
  return out;
}

// division with remainder by a divisor whose leading coefficient is
// invertible mod m; returns {quotient, remainder}
std::pair<Poly, Poly> pm_divmod(Poly a, const Poly& b, const mpz_class& m) {
  if (b.empty()) throw DomainError("polynomial division by zero");
  const mpz_class lead_inv = mod_inverse(b.back(), m);
  Poly q;
  pm_trim(a);
  if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, mpz_class(0));
  while (a.size() >= b.size()) {
    mpz_class f = a.back() * lead_inv;
    mpz_fdiv_r(f.get_mpz_t(), f.get_mpz_t(), m.get_mpz_t());
    const size_t shift = a.size() - b.size();
    q[shift] = f;
    if (f != 0) {
      for (size_t i = 0; i < b.size(); ++i) {
        a[shift + i] -= f * b[i];
        mpz_fdiv_r(a[shift + i].get_mpz_t(), a[shift + i].get_mpz_t(), m.get_mpz_t());
      }
    } else {
      a.pop_back();
      continue;
    }
    pm_trim(a);
  }
  return {std::move(q), std::move(a)};
}

Poly pm_mod(const Poly& a, const Poly& b, const mpz_class& m) {
  return pm_divmod(pm_reduce(a, m), b, m).second;
}

Poly pm_make_monic(Poly a, const mpz_class& m) {
  pm_trim(a);
  if (a.empty()) return a;
  const mpz_class inv = mod_inverse(a.back(), m);
  for (auto& c : a) {
    c *= inv;
    mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
  }
  return a;
}

Poly pm_gcd(Poly a, Poly b, const mpz_class& p) {
  a = pm_reduce(std::move(a), p);
  b = pm_reduce(std::move(b), p);
  while (!b.empty()) {
    Poly r = pm_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return pm_make_monic(std::move(a), p);
}

Poly pm_powmod(Poly base, mpz_class e, const Poly& mod, const mpz_class& p) {
  Poly result = {mpz_class(1)};
  base = pm_mod(base, mod, p);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = pm_mod(pm_mul(result, base, p), mod, p);
    e >>= 1;
    if (e > 0) base = pm_mod(pm_mul(base, base, p), mod, p);
  }
  return result;
}

// s*a + t*b = 1 for coprime a, b over Z/p; returns (s, t)
std::pair<Poly, Poly> pm_ext_gcd_coprime(const Poly& a, const Poly& b,
                                         const mpz_class& p) {
  Poly r0 = pm_reduce(a, p), r1 = pm_reduce(b, p);
  Poly s0 = {mpz_class(1)}, s1 = {};
  Poly t0 = {}, t1 = {mpz_class(1)};
  while (!r1.empty()) {
    auto [q, r2] = pm_divmod(r0, r1, p);
    Poly s2 = pm_sub(s0, pm_mul(q, s1, p), p);
    Poly t2 = pm_sub(t0, pm_mul(q, t1, p), p);
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.size() != 1) throw Error("inputs to the extended gcd are not coprime");
  const mpz_class inv = mod_inverse(r0[0], p);
  for (auto& c : s0) c = c * inv % p;
  for (auto& c : t0) c = c * inv % p;
  return {pm_reduce(std::move(s0), p), pm_reduce(std::move(t0), p)};
}

long multiplicative_order(long p, long M) {
  if (M == 1) return 1;
  long r = p % M;
  long f = 1;
  long acc = r;
  while (acc != 1) {
    acc = acc * r % M;
    ++f;
    if (f > M) throw Error("order computation ran away");
  }
  return f;
}

// Equal-degree factorization of the squarefree product of degree-f
// irreducibles over Z/p (Cantor-Zassenhaus, with the trace map at p = 2).
void equal_degree_split(const Poly& g, long f, long p, std::mt19937_64& rng,
                        std::vector<Poly>& out) {
  const long deg = static_cast<long>(g.size()) - 1;
  if (deg == f) {
    out.push_back(pm_make_monic(g, p));
    return;
  }
  const mpz_class pz(p);
  for (;;) {
    Poly a(static_cast<size_t>(deg), mpz_class(0));
    for (auto& c : a) c = static_cast<long>(rng() % static_cast<unsigned long>(p));
    pm_trim(a);
    if (a.empty() || static_cast<long>(a.size()) - 1 < 1) continue;
    Poly t;
    if (p == 2) {
      // trace map sum a^(2^i), i < f
      Poly acc = pm_mod(a, g, pz);
      t = acc;
      for (long i = 1; i < f; ++i) {
        acc = pm_mod(pm_mul(acc, acc, pz), g, pz);
        t = pm_add(t, acc, pz);
      }
    } else {
      mpz_class e;
      mpz_ui_pow_ui(e.get_mpz_t(), static_cast<unsigned long>(p),
                    static_cast<unsigned long>(f));
      e = (e - 1) / 2;
      t = pm_powmod(a, e, g, pz);
      t = pm_sub(t, {mpz_class(1)}, pz);
    }
    Poly d = pm_gcd(t, g, pz);
    const long dd = static_cast<long>(d.size()) - 1;
    if (dd <= 0 || dd >= deg) continue;
    auto [q, r] = pm_divmod(g, d, pz);
    if (!r.empty()) throw Error("split factor does not divide");
    equal_degree_split(d, f, p, rng, out);
    equal_degree_split(q, f, p, rng, out);
    return;
  }
}

// Lift h (mod p), a monic factor of target, to a monic factor mod p^k.
Poly hensel_lift(const Poly& target, Poly h, long p, long k) {
  const mpz_class pz(p);
  auto [g, rem] = pm_divmod(pm_reduce(target, pz), h, pz);
  if (!rem.empty()) throw Error("factor does not divide the target mod p");
  auto [s, t] = pm_ext_gcd_coprime(h, g, pz);
  mpz_class mod = pz;  // current modulus p^j
  for (long j = 1; j < k; ++j) {
    const mpz_class next = mod * pz;
    // delta = (target - h*g) / p^j  (mod p)
    Poly hg = pm_mul(h, g, next);
    Poly diff = pm_sub(pm_reduce(target, next), hg, next);
    Poly delta;
    delta.reserve(diff.size());
    for (const auto& c : diff) {
      mpz_class q, r;
      mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), c.get_mpz_t(), mod.get_mpz_t());
      if (r != 0) throw Error("lift defect not divisible by the modulus");
      delta.push_back(q);
    }
    delta = pm_reduce(std::move(delta), pz);
    // dh*g + dg*h = delta (mod p), deg dh < deg h
    Poly dh = pm_mod(pm_mul(t, delta, pz), h, pz);
    Poly num = pm_sub(delta, pm_mul(dh, g, pz), pz);
    auto [dg, r2] = pm_divmod(num, h, pz);
    if (!r2.empty()) throw Error("lift correction failed");
    // h += p^j dh; g += p^j dg
    Poly dh_scaled = dh;
    for (auto& c : dh_scaled) c *= mod;
    Poly dg_scaled = dg;
    for (auto& c : dg_scaled) c *= mod;
    h = pm_add(h, dh_scaled, next);
    g = pm_add(g, dg_scaled, next);
    mod = next;
  }
  // validate: h*g = target (mod p^k)
  Poly check = pm_sub(pm_reduce(target, mod), pm_mul(h, g, mod), mod);
  if (!check.empty()) throw Error("lift validation failed");
  return h;
}

}  // namespace

std::string PrimeIdealData::to_string() const {
  std::ostringstream os;
  os << "(" << p << ", ";
  bool first = true;
  for (long i = static_cast<long>(factor.size()) - 1; i >= 0; --i) {
    mpz_class c = factor[static_cast<size_t>(i)] % p;
    if (c < 0) c += p;
    if (c == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << c.get_str();
    } else {
      if (c != 1) os << c.get_str() << "*";
      os << "x";
      if (i > 1) os << "^" << i;
    }
  }
  if (first) os << "0";
  os << " mod " << p << ")";
  return os.str();
}

std::vector<PrimeIdealData> primes_above(long p, long M, long lift_precision) {
  if (p < 2) throw DomainError("p must be a prime");
  if (M < 1) throw DomainError("level must be positive");
  if (M % p == 0)
    throw DomainError("ramified prime: p divides the level");
  if (lift_precision < 1) throw DomainError("lift precision must be positive");

  const long f = multiplicative_order(p, M);
  ZPoly phi = cyclotomic_polynomial(M);
  Poly target(phi.begin(), phi.end());
  const mpz_class pz(p);
  std::vector<Poly> irreducibles;
  std::mt19937_64 rng(static_cast<unsigned long>(p) * 1000003u +
                      static_cast<unsigned long>(M));
  equal_degree_split(pm_reduce(target, pz), f, p, rng, irreducibles);
  if (static_cast<long>(irreducibles.size()) != euler_phi(M) / f)
    throw Error("wrong number of irreducible factors");
  std::sort(irreducibles.begin(), irreducibles.end(),
            [](const Poly& a, const Poly& b) { return a < b; });

  mpz_class modulus;
  mpz_ui_pow_ui(modulus.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(lift_precision));
  std::vector<PrimeIdealData> out;
  out.reserve(irreducibles.size());
  for (const Poly& h : irreducibles) {
    PrimeIdealData P;
    P.p = p;
    P.M = M;
    P.residue_degree = f;
    P.factor = hensel_lift(target, h, p, lift_precision);
    P.lift_precision = lift_precision;
    P.modulus = modulus;
    out.push_back(std::move(P));
  }
  return out;
}

PrimeIdealData deepen_lift(const PrimeIdealData& P, long new_precision) {
  if (new_precision <= P.lift_precision) return P;
  ZPoly phi = cyclotomic_polynomial(P.M);
  Poly target(phi.begin(), phi.end());
  Poly h0 = pm_reduce(P.factor, mpz_class(P.p));
  PrimeIdealData out = P;
  out.factor = hensel_lift(target, h0, P.p, new_precision);
  out.lift_precision = new_precision;
  mpz_ui_pow_ui(out.modulus.get_mpz_t(), static_cast<unsigned long>(P.p),
                static_cast<unsigned long>(new_precision));
  return out;
}

std::optional<long> vP_element(const CycNumber& a, const PrimeIdealData& P) {
  if (a.level() != P.M)
    throw LevelMismatchError("element level does not match the prime's level");
  if (a.is_zero()) return std::nullopt;  // infinity
  const mpz_class pz(P.p);
  mpz_class tmp;
  long denom_val = 0;
  if (mpz_divisible_p(a.denom().get_mpz_t(), pz.get_mpz_t()))
    denom_val = static_cast<long>(
        mpz_remove(tmp.get_mpz_t(), a.denom().get_mpz_t(), pz.get_mpz_t()));
  Poly numerator(a.coords().begin(), a.coords().end());
  Poly r = pm_mod(pm_reduce(std::move(numerator), P.modulus), P.factor, P.modulus);
  std::optional<long> best;
  for (const auto& c : r) {
    if (c == 0) continue;
    long v = static_cast<long>(
        mpz_remove(tmp.get_mpz_t(), c.get_mpz_t(), pz.get_mpz_t()));
    if (!best || v < *best) best = v;
    if (*best == 0) break;
  }
  if (!best)
    throw PrecisionError(
        "valuation reaches the lift precision; deepen the lift");
  return *best - denom_val;
}

std::optional<long> wP_series(const QSeries& g, const PrimeIdealData& P) {
  if (!g.all_coeffs_integral())
    throw IntegralityError("series valuation requires integral coefficients");
  if (g.coeff_level() != P.M)
    throw LevelMismatchError("coefficient level does not match the prime");
  std::optional<long> best;
  for (const auto& [key, coeff] : g.terms()) {
    auto v = vP_element(coeff, P);
    if (v && (!best || *v < *best)) best = *v;
    if (best && *best == 0) break;
  }
  return best;
}

}  // namespace modfun
