#include "modfun/cyclotomic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <utility>

namespace modfun {

namespace {

long checked_positive(long m, const char* what) {
  if (m < 1) throw DomainError(std::string(what) + " must be positive");
  return m;
}

int poly_degree(const ZPoly& p) {
  for (long i = static_cast<long>(p.size()) - 1; i >= 0; --i)
    if (p[i] != 0) return static_cast<int>(i);
  return -1;
}

ZPoly poly_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly out(a.size() + b.size() - 1, mpz_class(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

// Exact division of integer polynomials; the quotient must be integral and
// the remainder zero (used for the Moebius product where this is guaranteed).
ZPoly poly_divexact(ZPoly num, const ZPoly& den) {
  const int dn = poly_degree(num);
  const int dd = poly_degree(den);
  if (dd < 0) throw DomainError("polynomial division by zero");
  if (dn < dd) {
    if (dn >= 0) throw DomainError("inexact polynomial division");
    return {mpz_class(0)};
  }
  ZPoly quot(static_cast<size_t>(dn - dd) + 1, mpz_class(0));
  for (int i = dn; i >= dd; --i) {
    if (num[i] == 0) continue;
    mpz_class q;
    mpz_class r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num[i].get_mpz_t(),
                den[dd].get_mpz_t());
    if (r != 0) throw DomainError("inexact polynomial division");
    quot[i - dd] = q;
    for (int j = 0; j <= dd; ++j) num[i - dd + j] -= q * den[j];
  }
  if (poly_degree(num) >= 0) throw DomainError("inexact polynomial division");
  return quot;
}

ZPoly x_pow_minus_one(long k) {
  ZPoly p(static_cast<size_t>(k) + 1, mpz_class(0));
  p[0] = -1;
  p[static_cast<size_t>(k)] = 1;
  return p;
}

mpz_class vec_content(const std::vector<mpz_class>& v, const mpz_class& seed) {
  mpz_class g = seed;
  for (const auto& c : v) {
    if (g == 1) break;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  }
  return g;
}

}  // namespace

long euler_phi(long m) {
  checked_positive(m, "level");
  long result = m;
  long n = m;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      result -= result / p;
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

long mobius(long m) {
  checked_positive(m, "argument");
  long result = 1;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      m /= p;
      if (m % p == 0) return 0;
      result = -result;
    }
  }
  if (m > 1) result = -result;
  return result;
}

std::vector<long> divisors(long m) {
  checked_positive(m, "argument");
  std::vector<long> small, large;
  for (long d = 1; d * d <= m; ++d) {
    if (m % d == 0) {
      small.push_back(d);
      if (d != m / d) large.push_back(m / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

ZPoly cyclotomic_polynomial(long m) {
  checked_positive(m, "level");
  ZPoly num = {mpz_class(1)};
  ZPoly den = {mpz_class(1)};
  for (long d : divisors(m)) {
    switch (mobius(d)) {
      case 1:
        num = poly_mul(num, x_pow_minus_one(m / d));
        break;
      case -1:
        den = poly_mul(den, x_pow_minus_one(m / d));
        break;
      default:
        break;
    }
  }
  ZPoly phi = poly_divexact(std::move(num), den);
  phi.resize(static_cast<size_t>(euler_phi(m)) + 1);
  return phi;
}

// ---------------------------------------------------------------------------
// CycContext

const CycContext& CycContext::get(long level) {
  checked_positive(level, "level");
  static std::mutex mu;
  static std::map<long, std::unique_ptr<const CycContext>>* cache =
      new std::map<long, std::unique_ptr<const CycContext>>();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache->find(level);
  if (it == cache->end()) {
    it = cache->emplace(level, std::unique_ptr<const CycContext>(
                                   new CycContext(level)))
             .first;
  }
  return *it->second;
}

CycContext::CycContext(long level)
    : level_(level), degree_(euler_phi(level)), phi_(cyclotomic_polynomial(level)) {
  const long count = level_;
  power_.reserve(static_cast<size_t>(std::max<long>(count, 1)));
  std::vector<mpz_class> cur(static_cast<size_t>(degree_), mpz_class(0));
  cur[0] = 1;
  power_.push_back(cur);
  for (long j = 1; j < count; ++j) {
    // cur = x * cur mod phi
    mpz_class carry = cur[static_cast<size_t>(degree_) - 1];
    for (long i = degree_ - 1; i > 0; --i) cur[static_cast<size_t>(i)] = cur[static_cast<size_t>(i - 1)];
    cur[0] = 0;
    if (carry != 0) {
      for (long i = 0; i < degree_; ++i)
        cur[static_cast<size_t>(i)] -= carry * phi_[static_cast<size_t>(i)];
    }
    power_.push_back(cur);
  }
}

const std::vector<mpz_class>& CycContext::zeta_power(long j) const {
  j %= level_;
  if (j < 0) j += level_;
  return power_[static_cast<size_t>(j)];
}

// ---------------------------------------------------------------------------
// CycNumber

CycNumber::CycNumber() : CycNumber(&CycContext::get(1), {mpz_class(0)}, 1, true) {}

CycNumber::CycNumber(const CycContext* ctx, std::vector<mpz_class> coords,
                     mpz_class denom, bool normalized)
    : ctx_(ctx), coords_(std::move(coords)), denom_(std::move(denom)) {
  if (!normalized) normalize();
}

void CycNumber::normalize() {
  if (denom_ < 0) {
    denom_ = -denom_;
    for (auto& c : coords_) c = -c;
  }
  if (denom_ == 0) throw DivisionByZeroError("zero denominator");
  bool zero = std::all_of(coords_.begin(), coords_.end(),
                          [](const mpz_class& c) { return c == 0; });
  if (zero) {
    denom_ = 1;
    return;
  }
  if (denom_ == 1) return;
  mpz_class g = vec_content(coords_, denom_);
  if (g > 1) {
    for (auto& c : coords_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(denom_.get_mpz_t(), denom_.get_mpz_t(), g.get_mpz_t());
  }
}

CycNumber CycNumber::zero(long level) {
  const CycContext& ctx = CycContext::get(level);
  return CycNumber(&ctx, std::vector<mpz_class>(static_cast<size_t>(ctx.degree()), mpz_class(0)), 1, true);
}

CycNumber CycNumber::one(long level) {
  const CycContext& ctx = CycContext::get(level);
  std::vector<mpz_class> coords(static_cast<size_t>(ctx.degree()), mpz_class(0));
  coords[0] = 1;
  return CycNumber(&ctx, std::move(coords), 1, true);
}

CycNumber CycNumber::integer(mpz_class n) {
  return CycNumber(&CycContext::get(1), {std::move(n)}, 1, true);
}

CycNumber CycNumber::rational(mpz_class num, mpz_class den) {
  return CycNumber(&CycContext::get(1), {std::move(num)}, std::move(den), false);
}

CycNumber CycNumber::root_of_unity(long level, long power) {
  const CycContext& ctx = CycContext::get(level);
  return CycNumber(&ctx, ctx.zeta_power(power), 1, true);
}

CycNumber CycNumber::from_coords(long level, std::vector<mpz_class> coords,
                                 mpz_class denom) {
  const CycContext& ctx = CycContext::get(level);
  if (static_cast<long>(coords.size()) != ctx.degree())
    throw DomainError("coordinate vector has wrong length for level");
  return CycNumber(&ctx, std::move(coords), std::move(denom), false);
}

bool CycNumber::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(),
                     [](const mpz_class& c) { return c == 0; });
}

bool CycNumber::is_one() const {
  if (denom_ != 1 || coords_[0] != 1) return false;
  return std::all_of(coords_.begin() + 1, coords_.end(),
                     [](const mpz_class& c) { return c == 0; });
}

bool CycNumber::is_rational() const {
  return std::all_of(coords_.begin() + 1, coords_.end(),
                     [](const mpz_class& c) { return c == 0; });
}

mpq_class CycNumber::rational_value() const {
  if (!is_rational()) throw DomainError("value is not rational");
  mpq_class q(coords_[0], denom_);
  q.canonicalize();
  return q;
}

CycNumber CycNumber::operator-() const {
  std::vector<mpz_class> coords(coords_.size());
  for (size_t i = 0; i < coords_.size(); ++i) coords[i] = -coords_[i];
  return CycNumber(ctx_, std::move(coords), denom_, true);
}

static void require_same_level(const CycNumber& a, const CycNumber& b) {
  if (a.level() != b.level())
    throw LevelMismatchError("levels " + std::to_string(a.level()) + " and " +
                             std::to_string(b.level()) +
                             " combined without embedding");
}

CycNumber operator+(const CycNumber& a, const CycNumber& b) {
  require_same_level(a, b);
  std::vector<mpz_class> coords(a.coords_.size());
  if (a.denom_ == 1 && b.denom_ == 1) {
    for (size_t i = 0; i < coords.size(); ++i) coords[i] = a.coords_[i] + b.coords_[i];
    return CycNumber(a.ctx_, std::move(coords), 1, true);
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.denom_.get_mpz_t(), b.denom_.get_mpz_t());
  mpz_class fa = b.denom_ / g;
  mpz_class fb = a.denom_ / g;
  for (size_t i = 0; i < coords.size(); ++i)
    coords[i] = a.coords_[i] * fa + b.coords_[i] * fb;
  return CycNumber(a.ctx_, std::move(coords), a.denom_ * fa, false);
}

CycNumber operator-(const CycNumber& a, const CycNumber& b) { return a + (-b); }

CycNumber operator*(const CycNumber& a, const CycNumber& b) {
  require_same_level(a, b);
  const CycContext& ctx = *a.ctx_;
  const long d = ctx.degree();
  std::vector<mpz_class> raw(static_cast<size_t>(2 * d - 1), mpz_class(0));
  for (long i = 0; i < d; ++i) {
    if (a.coords_[static_cast<size_t>(i)] == 0) continue;
    for (long j = 0; j < d; ++j) {
      if (b.coords_[static_cast<size_t>(j)] == 0) continue;
      raw[static_cast<size_t>(i + j)] +=
          a.coords_[static_cast<size_t>(i)] * b.coords_[static_cast<size_t>(j)];
    }
  }
  for (long i = 2 * d - 2; i >= d; --i) {
    if (raw[static_cast<size_t>(i)] == 0) continue;
    const auto& row = ctx.zeta_power(i);
    for (long j = 0; j < d; ++j)
      raw[static_cast<size_t>(j)] += raw[static_cast<size_t>(i)] * row[static_cast<size_t>(j)];
  }
  raw.resize(static_cast<size_t>(d));
  bool integral = a.denom_ == 1 && b.denom_ == 1;
  return CycNumber(a.ctx_, std::move(raw), a.denom_ * b.denom_, integral);
}

bool CycNumber::operator==(const CycNumber& other) const {
  return ctx_ == other.ctx_ && denom_ == other.denom_ && coords_ == other.coords_;
}

namespace {

using QPoly = std::vector<mpq_class>;

int qpoly_degree(const QPoly& p) {
  for (long i = static_cast<long>(p.size()) - 1; i >= 0; --i)
    if (p[i] != 0) return static_cast<int>(i);
  return -1;
}

// r0 = q * r1 + r; returns (q, r).
std::pair<QPoly, QPoly> qpoly_divmod(QPoly r0, const QPoly& r1) {
  const int d1 = qpoly_degree(r1);
  QPoly q(static_cast<size_t>(std::max(qpoly_degree(r0) - d1 + 1, 1)), mpq_class(0));
  for (int i = qpoly_degree(r0); i >= d1; --i) {
    if (r0[static_cast<size_t>(i)] == 0) continue;
    mpq_class f = r0[static_cast<size_t>(i)] / r1[static_cast<size_t>(d1)];
    q[static_cast<size_t>(i - d1)] = f;
    for (int j = 0; j <= d1; ++j)
      r0[static_cast<size_t>(i - d1 + j)] -= f * r1[static_cast<size_t>(j)];
  }
  return {std::move(q), std::move(r0)};
}

QPoly qpoly_sub_mul(const QPoly& a, const QPoly& q, const QPoly& b) {
  QPoly out = a;
  size_t need = q.size() + b.size();
  if (out.size() < need) out.resize(need, mpq_class(0));
  for (size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) out[i + j] -= q[i] * b[j];
  }
  return out;
}

}  // namespace

CycNumber CycNumber::inverse() const {
  if (is_zero()) throw DivisionByZeroError("cyclotomic division by zero");
  const long d = ctx_->degree();
  QPoly r0(ctx_->phi_.size());
  for (size_t i = 0; i < r0.size(); ++i) r0[i] = mpq_class(ctx_->phi_[i]);
  QPoly r1(static_cast<size_t>(d));
  for (long i = 0; i < d; ++i) r1[static_cast<size_t>(i)] = mpq_class(coords_[static_cast<size_t>(i)]);
  // Invariant: s * numerator == r (mod phi).
  QPoly s0 = {mpq_class(0)};
  QPoly s1 = {mpq_class(1)};
  while (qpoly_degree(r1) > 0) {
    auto [q, r2] = qpoly_divmod(std::move(r0), r1);
    QPoly s2 = qpoly_sub_mul(s0, q, s1);
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (qpoly_degree(r1) != 0)
    throw Error("cyclotomic inverse: gcd degenerated (modulus not irreducible?)");
  const mpq_class c = r1[0];
  // inverse = denom * s1 / c
  std::vector<mpq_class> vals(static_cast<size_t>(d), mpq_class(0));
  for (size_t i = 0; i < s1.size() && i < vals.size(); ++i)
    vals[i] = s1[i] / c * mpq_class(denom_);
  mpz_class common(1);
  for (auto& v : vals) {
    v.canonicalize();
    mpz_class den = v.get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), common.get_mpz_t(), den.get_mpz_t());
    common *= den / g;
  }
  std::vector<mpz_class> coords(static_cast<size_t>(d));
  for (long i = 0; i < d; ++i) {
    const mpq_class& v = vals[static_cast<size_t>(i)];
    coords[static_cast<size_t>(i)] = v.get_num() * (common / v.get_den());
  }
  return CycNumber(ctx_, std::move(coords), common, false);
}

CycNumber operator/(const CycNumber& a, const CycNumber& b) {
  require_same_level(a, b);
  return a * b.inverse();
}

CycNumber CycNumber::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  CycNumber result = CycNumber::one(level());
  CycNumber base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

CycNumber CycNumber::embedded(long target_level) const {
  if (target_level % level() != 0)
    throw LevelMismatchError("level " + std::to_string(level()) +
                             " does not divide target " + std::to_string(target_level));
  if (target_level == level()) return *this;
  const CycContext& tgt = CycContext::get(target_level);
  const long k = target_level / level();
  std::vector<mpz_class> coords(static_cast<size_t>(tgt.degree()), mpz_class(0));
  for (long i = 0; i < ctx_->degree(); ++i) {
    const mpz_class& c = coords_[static_cast<size_t>(i)];
    if (c == 0) continue;
    const auto& row = tgt.zeta_power(i * k);
    for (long j = 0; j < tgt.degree(); ++j) coords[static_cast<size_t>(j)] += c * row[static_cast<size_t>(j)];
  }
  return CycNumber(&tgt, std::move(coords), denom_, false);
}

std::optional<CycNumber> CycNumber::lowered(long target_level) const {
  if (level() % target_level != 0)
    throw LevelMismatchError("target level must divide the current level");
  if (target_level == level()) return *this;
  const CycContext& sub = CycContext::get(target_level);
  const long rows = ctx_->degree();
  const long cols = sub.degree();
  const long k = level() / target_level;
  // Augmented system: columns are the images of the subfield basis.
  std::vector<std::vector<mpq_class>> m(static_cast<size_t>(rows),
                                        std::vector<mpq_class>(static_cast<size_t>(cols) + 1, mpq_class(0)));
  for (long j = 0; j < cols; ++j) {
    const auto& img = ctx_->zeta_power(j * k);
    for (long i = 0; i < rows; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = mpq_class(img[static_cast<size_t>(i)]);
  }
  for (long i = 0; i < rows; ++i)
    m[static_cast<size_t>(i)][static_cast<size_t>(cols)] = mpq_class(coords_[static_cast<size_t>(i)], denom_);
  // Gaussian elimination.
  std::vector<long> pivot_col_of_row;
  long row = 0;
  for (long col = 0; col < cols && row < rows; ++col) {
    long pr = -1;
    for (long i = row; i < rows; ++i)
      if (m[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) { pr = i; break; }
    if (pr < 0) continue;
    std::swap(m[static_cast<size_t>(pr)], m[static_cast<size_t>(row)]);
    mpq_class inv = m[static_cast<size_t>(row)][static_cast<size_t>(col)];
    for (long j = col; j <= cols; ++j) m[static_cast<size_t>(row)][static_cast<size_t>(j)] /= inv;
    for (long i = 0; i < rows; ++i) {
      if (i == row) continue;
      mpq_class f = m[static_cast<size_t>(i)][static_cast<size_t>(col)];
      if (f == 0) continue;
      for (long j = col; j <= cols; ++j)
        m[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * m[static_cast<size_t>(row)][static_cast<size_t>(j)];
    }
    pivot_col_of_row.push_back(col);
    ++row;
  }
  for (long i = row; i < rows; ++i)
    if (m[static_cast<size_t>(i)][static_cast<size_t>(cols)] != 0) return std::nullopt;
  std::vector<mpq_class> sol(static_cast<size_t>(cols), mpq_class(0));
  for (long i = 0; i < row; ++i)
    sol[static_cast<size_t>(pivot_col_of_row[static_cast<size_t>(i)])] =
        m[static_cast<size_t>(i)][static_cast<size_t>(cols)];
  mpz_class common(1);
  for (auto& v : sol) {
    v.canonicalize();
    mpz_class den = v.get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), common.get_mpz_t(), den.get_mpz_t());
    common *= den / g;
  }
  std::vector<mpz_class> coords(static_cast<size_t>(cols));
  for (long j = 0; j < cols; ++j)
    coords[static_cast<size_t>(j)] = sol[static_cast<size_t>(j)].get_num() *
                                     (common / sol[static_cast<size_t>(j)].get_den());
  return CycNumber(&sub, std::move(coords), common, false);
}

CycNumber CycNumber::galois(long d) const {
  const long m = level();
  long dm = d % m;
  if (dm < 0) dm += m;
  if (std::gcd(dm, m) != 1)
    throw DomainError("Galois exponent " + std::to_string(d) +
                      " is not coprime to level " + std::to_string(m));
  if (dm == 1 || is_rational()) return *this;
  std::vector<mpz_class> coords(coords_.size(), mpz_class(0));
  for (long i = 0; i < ctx_->degree(); ++i) {
    const mpz_class& c = coords_[static_cast<size_t>(i)];
    if (c == 0) continue;
    const auto& row = ctx_->zeta_power(i * dm);
    for (long j = 0; j < ctx_->degree(); ++j) coords[static_cast<size_t>(j)] += c * row[static_cast<size_t>(j)];
  }
  return CycNumber(ctx_, std::move(coords), denom_, false);
}

bool CycNumber::divisible_by(const mpz_class& p) const {
  if (denom_ != 1)
    throw IntegralityError("divisibility test requires an algebraic integer");
  for (const auto& c : coords_)
    if (!mpz_divisible_p(c.get_mpz_t(), p.get_mpz_t())) return false;
  return true;
}

std::optional<long> CycNumber::min_coord_valuation(const mpz_class& p) const {
  if (denom_ != 1)
    throw IntegralityError("valuation requires an algebraic integer");
  std::optional<long> best;
  mpz_class tmp;
  for (const auto& c : coords_) {
    if (c == 0) continue;
    long v = static_cast<long>(
        mpz_remove(tmp.get_mpz_t(), c.get_mpz_t(), p.get_mpz_t()));
    if (!best || v < *best) best = v;
    if (*best == 0) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// RawProductAccumulator

RawProductAccumulator::RawProductAccumulator(const CycContext& ctx)
    : ctx_(&ctx), raw_(static_cast<size_t>(2 * ctx.degree() - 1), mpz_class(0)) {}

void RawProductAccumulator::add_product(const CycNumber& a, const CycNumber& b) {
  const long d = ctx_->degree();
  touched_ = true;
  for (long i = 0; i < d; ++i) {
    const mpz_class& ai = a.coords_[static_cast<size_t>(i)];
    if (ai == 0) continue;
    for (long j = 0; j < d; ++j) {
      const mpz_class& bj = b.coords_[static_cast<size_t>(j)];
      if (bj == 0) continue;
      mpz_addmul(raw_[static_cast<size_t>(i + j)].get_mpz_t(), ai.get_mpz_t(),
                 bj.get_mpz_t());
    }
  }
}

CycNumber RawProductAccumulator::reduce() const {
  const long d = ctx_->degree();
  std::vector<mpz_class> coords(raw_.begin(), raw_.begin() + d);
  for (long i = 2 * d - 2; i >= d; --i) {
    const mpz_class& c = raw_[static_cast<size_t>(i)];
    if (c == 0) continue;
    const auto& row = ctx_->zeta_power(i);
    for (long j = 0; j < d; ++j)
      mpz_addmul(coords[static_cast<size_t>(j)].get_mpz_t(), c.get_mpz_t(),
                 row[static_cast<size_t>(j)].get_mpz_t());
  }
  return CycNumber(ctx_, std::move(coords), 1, true);
}

// ---------------------------------------------------------------------------
// Text form

std::string CycNumber::to_string() const {
  return to_compact_string() + " @ level " + std::to_string(level());
}

std::string CycNumber::to_compact_string() const {
  std::ostringstream os;
  os << '(';
  bool first = true;
  for (long i = 0; i < ctx_->degree(); ++i) {
    const mpz_class& c = coords_[static_cast<size_t>(i)];
    if (c == 0) continue;
    mpz_class mag = abs(c);
    if (first) {
      if (c < 0) os << '-';
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (i == 0) {
      os << mag.get_str();
    } else {
      if (mag != 1) os << mag.get_str() << '*';
      os << 'z';
      if (i > 1) os << '^' << i;
    }
  }
  if (first) os << '0';
  os << ')';
  if (denom_ != 1) os << '/' << denom_.get_str();
  return os.str();
}

namespace {

struct Cursor {
  std::string_view s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool eat_word(std::string_view w) {
    skip_ws();
    if (s.substr(pos, w.size()) == w) {
      pos += w.size();
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " at position " + std::to_string(pos) + " in \"" +
                     std::string(s) + "\"");
  }
  mpz_class integer() {
    skip_ws();
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    size_t digits = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == digits) fail("expected integer");
    return mpz_class(std::string(s.substr(start, pos - start)), 10);
  }
  long small_integer() {
    mpz_class v = integer();
    if (!v.fits_slong_p()) fail("integer out of range");
    return v.get_si();
  }
};

}  // namespace

CycNumber CycNumber::parse(std::string_view text) {
  Cursor cur{text};
  if (!cur.eat('(')) cur.fail("expected '('");
  // signed terms: [int][*] [z[^k]]
  std::map<long, mpz_class> term;
  bool first = true;
  for (;;) {
    cur.skip_ws();
    int sign = 1;
    if (cur.eat('-')) sign = -1;
    else if (cur.eat('+')) sign = 1;
    else if (!first) break;
    cur.skip_ws();
    mpz_class coef(1);
    bool have_coef = false;
    if (cur.peek() == '-' || std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      coef = cur.integer();
      have_coef = true;
    }
    long power = 0;
    bool have_z = false;
    size_t save = cur.pos;
    if (have_coef && !cur.eat('*')) {
      // plain constant, or implicit z without '*' is not produced by the renderer
      cur.pos = save;
    }
    if (cur.eat('z')) {
      have_z = true;
      power = 1;
      if (cur.eat('^')) power = cur.small_integer();
    }
    if (!have_coef && !have_z) {
      if (first) break;  // "(0)" handled below via empty map
      cur.fail("expected term");
    }
    term[power] += sign * coef;
    first = false;
  }
  if (!cur.eat(')')) cur.fail("expected ')'");
  mpz_class denom(1);
  if (cur.eat('/')) denom = cur.integer();
  long level = 1;
  bool have_level = false;
  if (cur.eat('@')) {
    cur.eat_word("level");
    level = cur.small_integer();
    have_level = true;
  }
  if (!cur.at_end()) cur.fail("trailing characters");
  if (!have_level) level = 1;
  const CycContext& ctx = CycContext::get(level);
  std::vector<mpz_class> coords(static_cast<size_t>(ctx.degree()), mpz_class(0));
  for (const auto& [pw, c] : term) {
    if (pw < 0) throw ParseError("negative power of z");
    if (pw >= ctx.degree()) {
      // reduce high powers through the modulus
      const auto& row = ctx.zeta_power(pw);
      for (long j = 0; j < ctx.degree(); ++j) coords[static_cast<size_t>(j)] += c * row[static_cast<size_t>(j)];
    } else {
      coords[static_cast<size_t>(pw)] += c;
    }
  }
  return CycNumber(&ctx, std::move(coords), std::move(denom), false);
}

bool frobenius_residue_check(const CycNumber& c, long p) {
  if (p < 2) throw DomainError("p must be a prime");
  if (!c.is_integral())
    throw IntegralityError("Frobenius check requires an algebraic integer");
  if (c.level() % p == 0)
    throw DomainError("p divides the level");
  CycNumber diff = c.pow(p) - c.galois(p);
  return diff.divisible_by(mpz_class(p));
}

}  // namespace modfun
