#include "modfun/modforms.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

namespace modfun {

namespace {

long positive_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

long ceil_div(long a, long b) {
  long q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// FrickeIndex

FrickeIndex::FrickeIndex(long N_, long a_, long b_) : N(N_) {
  if (N < 2) throw DomainError("torsion level must be at least 2");
  a = positive_mod(a_, N);
  b = positive_mod(b_, N);
  if (a == 0 && b == 0)
    throw DomainError("torsion label (0, 0) is not allowed");
  const long na = positive_mod(-a, N);
  const long nb = positive_mod(-b, N);
  if (std::make_pair(na, nb) < std::make_pair(a, b)) {
    a = na;
    b = nb;
  }
}

std::string FrickeIndex::to_string() const {
  std::ostringstream os;
  os << "fricke(" << N << "," << a << "," << b << ")";
  return os.str();
}

bool operator<(const FrickeIndex& x, const FrickeIndex& y) {
  return std::tie(x.N, x.a, x.b) < std::tie(y.N, y.a, y.b);
}

std::vector<FrickeIndex> all_fricke_indices(long N) {
  std::vector<FrickeIndex> out;
  for (long a = 0; a < N; ++a)
    for (long b = 0; b < N; ++b) {
      if (a == 0 && b == 0) continue;
      FrickeIndex v(N, a, b);
      if (v.a == a && v.b == b) out.push_back(v);
    }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Building blocks

namespace {

// prod_{n>=1} (1 - q^(s n)) on [0, prec) via the pentagonal number theorem.
QSeries euler_product(long s, long prec) {
  std::vector<QSeries::Term> terms;
  for (long k = 0;; ++k) {
    const long g1 = s * k * (3 * k - 1) / 2;
    const long g2 = s * k * (3 * k + 1) / 2;
    if (g1 >= prec && g2 >= prec && k > 0) break;
    const CycNumber c = CycNumber::integer((k % 2 == 0) ? 1 : -1);
    if (g1 < prec) terms.emplace_back(g1, c);
    if (k > 0 && g2 < prec) terms.emplace_back(g2, c);
  }
  return QSeries::from_terms(1, 1, 0, prec, std::move(terms));
}

}  // namespace

QSeries delta_tilde(long prec) {
  if (prec < 1) throw DomainError("window bound must be at least 1");
  if (prec == 1) return QSeries::zero(1, 1, 1, 1);
  QSeries p24 = euler_product(1, prec).pow(24);
  QSeries q = QSeries::monomial(CycNumber::integer(1), 1, 1, 1, prec + 1);
  return (q * p24).truncated(prec);
}

QSeries eisenstein(int weight, long prec) {
  if (weight != 4 && weight != 6) throw DomainError("weight must be 4 or 6");
  if (prec < 1) throw DomainError("window bound must be at least 1");
  const long factor = weight == 4 ? 240 : -504;
  const int power = weight - 1;
  std::vector<mpz_class> sums(static_cast<size_t>(std::max<long>(prec, 1)), mpz_class(0));
  for (long d = 1; d < prec; ++d) {
    mpz_class dp(d);
    mpz_pow_ui(dp.get_mpz_t(), dp.get_mpz_t(), static_cast<unsigned long>(power));
    for (long n = d; n < prec; n += d) sums[static_cast<size_t>(n)] += dp;
  }
  std::vector<QSeries::Term> terms;
  terms.emplace_back(0, CycNumber::integer(1));
  for (long n = 1; n < prec; ++n)
    terms.emplace_back(n, CycNumber::integer(factor * sums[static_cast<size_t>(n)]));
  return QSeries::from_terms(1, 1, 0, prec, std::move(terms));
}

namespace {

std::mutex cache_mutex;
std::map<long, QSeries>* j_cache = new std::map<long, QSeries>();
std::map<long, QSeries>* prefactor_cache = new std::map<long, QSeries>();
std::map<std::tuple<long, long, long, long>, QSeries>* fricke_cache =
    new std::map<std::tuple<long, long, long, long>, QSeries>();

QSeries j_uncached(long prec) {
  QSeries e4 = eisenstein(4, prec + 1);
  QSeries delta = delta_tilde(prec + 2);
  return (e4.pow(3) * delta.invert_unit()).truncated(prec);
}

// 12 * E4 * E6 / delta_tilde, window [-1, prec).
QSeries fricke_prefactor(long prec) {
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = prefactor_cache->find(prec);
    if (it != prefactor_cache->end()) return it->second;
  }
  QSeries e4 = eisenstein(4, prec + 1);
  QSeries e6 = eisenstein(6, prec + 1);
  QSeries delta = delta_tilde(prec + 2);
  QSeries out = (e4 * e6 * delta.invert_unit())
                    .scaled(CycNumber::integer(12))
                    .truncated(prec);
  std::lock_guard<std::mutex> lock(cache_mutex);
  prefactor_cache->emplace(prec, out);
  return out;
}

}  // namespace

QSeries j_expansion(long prec) {
  if (prec < 0) throw DomainError("window bound must be nonnegative");
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = j_cache->find(prec);
    if (it != j_cache->end()) return it->second;
  }
  QSeries out = j_uncached(prec);
  std::lock_guard<std::mutex> lock(cache_mutex);
  j_cache->emplace(prec, out);
  return out;
}

namespace {

// m * zeta_N^power as a level-N value.
CycNumber scaled_root(long N, long power, long m) {
  CycNumber z = CycNumber::root_of_unity(N, power);
  std::vector<mpz_class> coords = z.coords();
  for (auto& c : coords) c *= m;
  return CycNumber::from_coords(N, std::move(coords));
}

}  // namespace

QSeries weierstrass_p_expansion_raw(long N, long a, long b, long prec) {
  if (N < 2) throw DomainError("torsion level must be at least 2");
  a = positive_mod(a, N);
  b = positive_mod(b, N);
  if (a == 0 && b == 0) throw DomainError("torsion label (0, 0) is not allowed");
  if (prec < 1) throw DomainError("window bound must be at least 1");

  std::map<long, CycNumber> acc;
  auto add = [&](long key, const CycNumber& c) {
    auto it = acc.find(key);
    if (it == acc.end())
      acc.emplace(key, c);
    else
      it->second += c;
  };

  add(0, CycNumber::rational(1, 12).embedded(N));

  if (a == 0) {
    // w = zeta^b is a constant; w/(1-w)^2 joins the constant term.
    CycNumber w = CycNumber::root_of_unity(N, b);
    CycNumber onemw = CycNumber::one(N) - w;
    add(0, w / (onemw * onemw));
  } else {
    // w/(1-w)^2 = sum_{m>=1} m w^m, a genuine q^(a/N) series.
    for (long m = 1; a * m < prec; ++m) add(a * m, scaled_root(N, b * m, m));
  }
  for (long n = 1; n * N - a < prec; ++n) {
    // q^n w / (1 - q^n w)^2
    for (long m = 1; (n * N + a) * m < prec; ++m)
      add((n * N + a) * m, scaled_root(N, b * m, m));
    // q^n w^-1 / (1 - q^n w^-1)^2
    for (long m = 1; (n * N - a) * m < prec; ++m)
      add((n * N - a) * m, scaled_root(N, -b * m, m));
    // -2 q^n / (1 - q^n)^2
    for (long m = 1; n * N * m < prec; ++m)
      add(n * N * m, scaled_root(N, 0, -2 * m));
  }
  std::vector<QSeries::Term> terms;
  for (auto& [key, coeff] : acc)
    if (!coeff.is_zero()) terms.emplace_back(key, std::move(coeff));
  return QSeries::from_terms(N, N, 0, prec, std::move(terms));
}

QSeries weierstrass_p_expansion(const FrickeIndex& v, long prec) {
  return weierstrass_p_expansion_raw(v.N, v.a, v.b, prec);
}

QSeries fricke_expansion(const FrickeIndex& v, long prec) {
  const auto key = std::make_tuple(v.N, v.a, v.b, prec);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = fricke_cache->find(key);
    if (it != fricke_cache->end()) return it->second;
  }
  const long N = v.N;
  // Window bookkeeping: the product with the q^-1 prefactor eats one q-unit
  // from the Weierstrass window, so expand that one N keys further.
  const long p_prec = prec + N;
  const long pref_prec = ceil_div(prec, N) + 2;
  QSeries p = weierstrass_p_expansion(v, p_prec);
  QSeries out = (fricke_prefactor(pref_prec) * p).truncated(prec);
  if (out.prec() < prec)
    throw PrecisionError("torsion-value expansion fell short of its window");
  std::lock_guard<std::mutex> lock(cache_mutex);
  fricke_cache->emplace(key, out);
  return out;
}

// ---------------------------------------------------------------------------
// Eta quotients

EtaQuotientSpec::EtaQuotientSpec(std::vector<std::pair<long, long>> raw) {
  if (raw.empty()) throw DomainError("eta quotient needs at least one factor");
  std::map<long, long> merged;
  long weight = 0;
  for (auto [m, e] : raw) {
    if (m < 1) throw DomainError("eta argument multiplier must be positive");
    merged[m] += e;
    weight += e;
  }
  if (weight != 0)
    throw DomainError("eta quotient must have weight zero (exponents sum to 0)");
  for (auto [m, e] : merged)
    if (e != 0) factors.emplace_back(m, e);
  if (factors.empty())  // the empty quotient is the constant 1
    factors.emplace_back(1, 0);
}

long EtaQuotientSpec::leading_numerator_24() const {
  long s = 0;
  for (auto [m, e] : factors) s += m * e;
  return s;
}

std::string EtaQuotientSpec::to_string() const {
  std::ostringstream os;
  os << "eta(";
  bool first = true;
  for (auto [m, e] : factors) {
    if (!first) os << " * ";
    first = false;
    os << m << "^" << e;
  }
  os << ")";
  return os.str();
}

QSeries eta_quotient_expansion(const EtaQuotientSpec& spec, long prec) {
  const long d = spec.leading_numerator_24();
  const long g = std::gcd(d < 0 ? -d : d, 24L);
  const long M = 24 / (g == 0 ? 24 : g);
  const long lead_key = d / (24 / M);  // d * M / 24
  // integer window needed beyond the fractional leading exponent
  const long w = std::max<long>(ceil_div(prec - lead_key, M) + 1, 2);
  QSeries num = QSeries::from_terms(1, 1, 0, w, {{0, CycNumber::integer(1)}});
  QSeries den = num;
  for (auto [m, e] : spec.factors) {
    if (e == 0) continue;
    QSeries p = euler_product(m, w);
    if (e > 0)
      num = (num * p.pow(e)).truncated(w);
    else
      den = (den * p.pow(-e)).truncated(w);
  }
  QSeries inner = (num * den.invert_unit()).truncated(w);
  // shift exponents by lead_key on the (1/M) lattice
  std::vector<QSeries::Term> terms;
  for (const auto& [key, coeff] : inner.terms())
    terms.emplace_back(key * M + lead_key, coeff);
  QSeries out = QSeries::from_terms(M, 1, inner.low() * M + lead_key,
                                    inner.prec() * M + lead_key, std::move(terms));
  return out.truncated(prec);
}

// ---------------------------------------------------------------------------
// Subject

Subject Subject::j() {
  Subject s(Kind::J, 1);
  s.description_ = "j";
  return s;
}

Subject Subject::fricke(FrickeIndex v, long scale) {
  if (scale == 0) throw DomainError("subject scale must be nonzero");
  Subject s(Kind::Fricke, v.N);
  s.index_ = v;
  s.scale_ = scale;
  s.description_ =
      scale == 1 ? v.to_string() : std::to_string(scale) + "*" + v.to_string();
  return s;
}

Subject Subject::eta(EtaQuotientSpec spec, long declared_level) {
  if (declared_level < 1) throw DomainError("level must be positive");
  Subject s(Kind::Eta, declared_level);
  s.description_ = spec.to_string();
  s.eta_ = std::move(spec);
  return s;
}

const FrickeIndex& Subject::index() const {
  if (!index_) throw DomainError("subject has no torsion label");
  return *index_;
}

const EtaQuotientSpec& Subject::eta_spec() const {
  if (!eta_) throw DomainError("subject is not an eta quotient");
  return *eta_;
}

long Subject::natural_denom() const {
  switch (kind_) {
    case Kind::J:
      return 1;
    case Kind::Fricke:
      return level_;
    case Kind::Eta: {
      const long d = eta_->leading_numerator_24();
      const long g = std::gcd(d < 0 ? -d : d, 24L);
      return 24 / (g == 0 ? 24 : g);
    }
  }
  throw Error("unreachable");
}

QSeries Subject::expansion(long prec) const {
  switch (kind_) {
    case Kind::J:
      return j_expansion(prec);
    case Kind::Fricke: {
      QSeries e = fricke_expansion(*index_, prec);
      if (scale_ != 1) e = e.scaled(CycNumber::integer(scale_).embedded(level_));
      return e;
    }
    case Kind::Eta:
      return eta_quotient_expansion(*eta_, prec);
  }
  throw Error("unreachable");
}

}  // namespace modfun
