#include "modfun/qseries.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

namespace modfun {

namespace {

long ceil_div(long a, long b) {
  // b > 0
  long q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

long positive_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

QSeries::QSeries() : QSeries(Raw{}, 1, 1, 0, 0, {}) {}

QSeries::QSeries(Raw, long exp_denom, long coeff_level, long low, long prec,
                 std::vector<Term> terms)
    : exp_denom_(exp_denom),
      coeff_level_(coeff_level),
      low_(low),
      prec_(prec),
      terms_(std::move(terms)) {
  // low is canonicalized to the tightest visible support bound so that equal
  // term content always yields structurally equal series. Coefficients below
  // it stay certified zeros.
  low_ = terms_.empty() ? prec_ : terms_.front().first;
}

// Divide the exponent lattice by the gcd of the denominator with all stored
// keys. Window edges move by ceiling division, which can only shrink the
// certified region, never grow it.
void QSeries::canonicalize_lattice() {
  long g = exp_denom_;
  if (terms_.empty()) {
    g = std::gcd(g, std::gcd(low_, prec_));
  } else {
    for (const auto& [key, coeff] : terms_) {
      g = std::gcd(g, key);
      if (g == 1) break;
    }
  }
  if (g <= 1) return;
  exp_denom_ /= g;
  low_ = ceil_div(low_, g);
  prec_ = ceil_div(prec_, g);
  for (auto& [key, coeff] : terms_) key /= g;
  low_ = terms_.empty() ? prec_ : terms_.front().first;
}

QSeries QSeries::zero(long exp_denom, long coeff_level, long low, long prec) {
  return from_terms(exp_denom, coeff_level, low, prec, {});
}

QSeries QSeries::monomial(CycNumber coeff, long key, long exp_denom, long low,
                          long prec) {
  const long level = coeff.level();
  std::vector<Term> terms;
  terms.emplace_back(key, std::move(coeff));
  return from_terms(exp_denom, level, low, prec, std::move(terms));
}

QSeries QSeries::from_terms(long exp_denom, long coeff_level, long low,
                            long prec, std::vector<Term> terms) {
  if (exp_denom < 1) throw DomainError("exponent denominator must be positive");
  if (coeff_level < 1) throw DomainError("coefficient level must be positive");
  if (low > prec) throw DomainError("series window is inverted");
  std::map<long, CycNumber> merged;
  for (auto& [key, coeff] : terms) {
    if (key < low || key >= prec)
      throw DomainError("series term at key " + std::to_string(key) +
                        " outside window");
    CycNumber c = coeff.level() == coeff_level ? std::move(coeff)
                                               : coeff.embedded(coeff_level);
    auto it = merged.find(key);
    if (it == merged.end())
      merged.emplace(key, std::move(c));
    else
      it->second += c;
  }
  std::vector<Term> out;
  out.reserve(merged.size());
  for (auto& [key, coeff] : merged)
    if (!coeff.is_zero()) out.emplace_back(key, std::move(coeff));
  return QSeries(Raw{}, exp_denom, coeff_level, low, prec, std::move(out));
}

std::optional<long> QSeries::leading_key() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.front().first;
}

CycNumber QSeries::coeff(long key) const {
  if (key >= prec_)
    throw PrecisionError("coefficient at key " + std::to_string(key) +
                         " is beyond the certified window");
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), key,
      [](const Term& t, long k) { return t.first < k; });
  if (it != terms_.end() && it->first == key) return it->second;
  return CycNumber::zero(coeff_level_);
}

QSeries QSeries::promoted(long new_exp_denom, long new_coeff_level) const {
  if (new_exp_denom % exp_denom_ != 0)
    throw LevelMismatchError("exponent lattice does not refine");
  if (new_coeff_level % coeff_level_ != 0)
    throw LevelMismatchError("coefficient field does not extend");
  const long f = new_exp_denom / exp_denom_;
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_)
    terms.emplace_back(key * f, coeff.level() == new_coeff_level
                                    ? coeff
                                    : coeff.embedded(new_coeff_level));
  return QSeries(Raw{}, new_exp_denom, new_coeff_level, low_ * f, prec_ * f,
                 std::move(terms));
}

QSeries QSeries::truncated(long new_prec) const {
  if (new_prec >= prec_) return *this;
  std::vector<Term> terms;
  long lo = std::min(low_, new_prec);
  for (const auto& t : terms_)
    if (t.first < new_prec) terms.push_back(t);
  return QSeries(Raw{}, exp_denom_, coeff_level_, lo, new_prec, std::move(terms));
}

QSeries QSeries::operator-() const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_) terms.emplace_back(key, -coeff);
  return QSeries(Raw{}, exp_denom_, coeff_level_, low_, prec_, std::move(terms));
}

namespace {

struct Aligned {
  long exp_denom;
  long coeff_level;
  long fa, fb;  // key scale factors
};

Aligned align(const QSeries& a, const QSeries& b) {
  Aligned al;
  al.exp_denom = std::lcm(a.exp_denom(), b.exp_denom());
  al.coeff_level = std::lcm(a.coeff_level(), b.coeff_level());
  al.fa = al.exp_denom / a.exp_denom();
  al.fb = al.exp_denom / b.exp_denom();
  return al;
}

CycNumber embedded_to(const CycNumber& c, long level) {
  return c.level() == level ? c : c.embedded(level);
}

}  // namespace

QSeries operator+(const QSeries& a, const QSeries& b) {
  const Aligned al = align(a, b);
  const long lo = std::min(a.low() * al.fa, b.low() * al.fb);
  const long hi = std::min(a.prec() * al.fa, b.prec() * al.fb);
  std::vector<QSeries::Term> terms;
  terms.reserve(a.terms().size() + b.terms().size());
  size_t i = 0, j = 0;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  while (i < ta.size() || j < tb.size()) {
    long ka = i < ta.size() ? ta[i].first * al.fa : LONG_MAX;
    long kb = j < tb.size() ? tb[j].first * al.fb : LONG_MAX;
    long k = std::min(ka, kb);
    if (k >= hi) break;
    CycNumber c = CycNumber::zero(al.coeff_level);
    if (ka == k) c += embedded_to(ta[i++].second, al.coeff_level);
    if (kb == k) c += embedded_to(tb[j++].second, al.coeff_level);
    if (!c.is_zero()) terms.emplace_back(k, std::move(c));
  }
  return QSeries::from_terms(al.exp_denom, al.coeff_level, std::min(lo, hi), hi,
                             std::move(terms));
}

QSeries operator-(const QSeries& a, const QSeries& b) { return a + (-b); }

QSeries operator*(const QSeries& a, const QSeries& b) {
  const Aligned al = align(a, b);
  const long la = a.low() * al.fa, ka = a.prec() * al.fa;
  const long lb = b.low() * al.fb, kb = b.prec() * al.fb;
  const long lo = la + lb;
  long hi = std::min(la + kb, lb + ka);
  if (hi < lo) hi = lo;
  if (a.terms().empty() || b.terms().empty())
    return QSeries::from_terms(al.exp_denom, al.coeff_level, lo, hi, {});
  const long slots = hi - lo;
  if (slots > (1L << 26))
    throw PrecisionError("series product window too large: " +
                         std::to_string(slots) + " slots");

  const bool fast = a.all_coeffs_integral() && b.all_coeffs_integral();
  std::vector<QSeries::Term> terms;
  if (fast) {
    const CycContext& ctx = CycContext::get(al.coeff_level);
    std::vector<std::unique_ptr<RawProductAccumulator>> acc(
        static_cast<size_t>(slots));
    std::vector<QSeries::Term> ta, tb;
    ta.reserve(a.terms().size());
    for (const auto& [key, c] : a.terms())
      ta.emplace_back(key * al.fa, embedded_to(c, al.coeff_level));
    tb.reserve(b.terms().size());
    for (const auto& [key, c] : b.terms())
      tb.emplace_back(key * al.fb, embedded_to(c, al.coeff_level));
    for (const auto& [ak, ac] : ta) {
      if (ak + tb.front().first >= hi) break;
      for (const auto& [bk, bc] : tb) {
        const long k = ak + bk;
        if (k >= hi) break;
        auto& slot = acc[static_cast<size_t>(k - lo)];
        if (!slot) slot = std::make_unique<RawProductAccumulator>(ctx);
        slot->add_product(ac, bc);
      }
    }
    for (long k = 0; k < slots; ++k) {
      const auto& slot = acc[static_cast<size_t>(k)];
      if (!slot) continue;
      CycNumber c = slot->reduce();
      if (!c.is_zero()) terms.emplace_back(lo + k, std::move(c));
    }
  } else {
    std::map<long, CycNumber> accum;
    for (const auto& [akr, ac] : a.terms()) {
      const long ak = akr * al.fa;
      const CycNumber ae = embedded_to(ac, al.coeff_level);
      for (const auto& [bkr, bc] : b.terms()) {
        const long k = ak + bkr * al.fb;
        if (k >= hi) break;
        CycNumber prod = ae * embedded_to(bc, al.coeff_level);
        auto it = accum.find(k);
        if (it == accum.end())
          accum.emplace(k, std::move(prod));
        else
          it->second += prod;
      }
    }
    for (auto& [k, c] : accum)
      if (!c.is_zero()) terms.emplace_back(k, std::move(c));
  }
  return QSeries(QSeries::Raw{}, al.exp_denom, al.coeff_level, lo, hi,
                 std::move(terms));
}

QSeries QSeries::scaled(const CycNumber& c) const {
  const long level = std::lcm(coeff_level_, c.level());
  const CycNumber ce = embedded_to(c, level);
  std::vector<Term> terms;
  if (!ce.is_zero()) {
    terms.reserve(terms_.size());
    for (const auto& [key, coeff] : terms_)
      terms.emplace_back(key, embedded_to(coeff, level) * ce);
  }
  return QSeries(Raw{}, exp_denom_, level, low_, prec_, std::move(terms));
}

QSeries QSeries::pow(long e) const {
  if (e < 1) throw DomainError("series power requires a positive exponent");
  QSeries result = *this;
  QSeries base = *this;
  e -= 1;
  // result * base^e with square-and-multiply; the window this produces is
  // exactly the window of the e-fold product.
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

QSeries QSeries::invert_unit() const {
  if (terms_.empty())
    throw DivisionByZeroError("inverting a series with no nonzero term in its window");
  const long lead = terms_.front().first;
  const long count = prec_ - lead;
  if (count <= 0)
    throw DivisionByZeroError("inverting a series with an empty window");
  // dense copy of f starting at the leading key
  std::vector<CycNumber> f(static_cast<size_t>(count), CycNumber::zero(coeff_level_));
  for (const auto& [key, coeff] : terms_) f[static_cast<size_t>(key - lead)] = coeff;
  const CycNumber inv0 = f[0].inverse();
  std::vector<CycNumber> g(static_cast<size_t>(count), CycNumber::zero(coeff_level_));
  g[0] = inv0;
  for (long t = 1; t < count; ++t) {
    CycNumber s = CycNumber::zero(coeff_level_);
    for (long i = 1; i <= t; ++i) {
      if (f[static_cast<size_t>(i)].is_zero()) continue;
      s += f[static_cast<size_t>(i)] * g[static_cast<size_t>(t - i)];
    }
    if (!s.is_zero()) g[static_cast<size_t>(t)] = -(inv0 * s);
  }
  std::vector<Term> terms;
  for (long t = 0; t < count; ++t)
    if (!g[static_cast<size_t>(t)].is_zero())
      terms.emplace_back(-lead + t, std::move(g[static_cast<size_t>(t)]));
  return QSeries(Raw{}, exp_denom_, coeff_level_, -lead, prec_ - 2 * lead,
                 std::move(terms));
}

QSeries QSeries::rescale_to_subtau(long p) const {
  if (p < 1) throw DomainError("rescale factor must be positive");
  QSeries out(Raw{}, exp_denom_ * p, coeff_level_, low_, prec_, terms_);
  out.canonicalize_lattice();  // constants and the like stay level-independent
  return out;
}

QSeries QSeries::substitute_up(long m) const {
  if (m < 1) throw DomainError("substitution factor must be positive");
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_) terms.emplace_back(key * m, coeff);
  QSeries out(Raw{}, exp_denom_, coeff_level_, low_ * m, prec_ * m,
              std::move(terms));
  out.canonicalize_lattice();
  return out;
}

QSeries QSeries::twist_shift(long k, long p) const {
  if (p < 1) throw DomainError("twist denominator must be positive");
  const long big = exp_denom_ * p;
  if (positive_mod(k, big) == 0) return rescale_to_subtau(p);
  const long level = std::lcm(coeff_level_, big);
  const long step = level / big;
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_) {
    const long e = positive_mod(positive_mod(key, big) * positive_mod(k, big), big);
    CycNumber c = embedded_to(coeff, level) *
                  CycNumber::root_of_unity(level, e * step);
    terms.emplace_back(key, std::move(c));
  }
  QSeries out(Raw{}, big, level, low_, prec_, std::move(terms));
  out.canonicalize_lattice();
  return out;
}

QSeries QSeries::galois_on_coeffs(long d) const {
  if (std::gcd(positive_mod(d, coeff_level_), coeff_level_) != 1 &&
      coeff_level_ != 1)
    throw DomainError("Galois exponent not coprime to the coefficient level");
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_) terms.emplace_back(key, coeff.galois(d));
  return QSeries(Raw{}, exp_denom_, coeff_level_, low_, prec_, std::move(terms));
}

bool QSeries::all_coeffs_integral() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.second.is_integral(); });
}

bool QSeries::all_coeffs_divisible_by(const mpz_class& p) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return t.second.divisible_by(p); });
}

std::optional<long> QSeries::min_p_power(const mpz_class& p) const {
  std::optional<long> best;
  for (const auto& [key, coeff] : terms_) {
    auto v = coeff.min_coord_valuation(p);
    if (v && (!best || *v < *best)) best = *v;
    if (best && *best == 0) break;
  }
  return best;
}

bool QSeries::pth_power_frobenius_check(long p) const {
  if (p < 2) throw DomainError("p must be a prime");
  if (!all_coeffs_integral())
    throw IntegralityError("Frobenius series check requires integral coefficients");
  QSeries lhs = pow(p);
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_)
    terms.emplace_back(key * p, coeff.pow(p));
  QSeries rhs = QSeries(Raw{}, exp_denom_, coeff_level_, low_ * p, prec_ * p,
                        std::move(terms));
  return (lhs - rhs).all_coeffs_divisible_by(mpz_class(p));
}

QSeries QSeries::with_integer_exponents() const {
  if (exp_denom_ == 1) return *this;
  if (!terms_.empty())
    throw DomainError("series still has fractional exponents");
  return QSeries(Raw{}, 1, coeff_level_, ceil_div(low_, exp_denom_),
                 ceil_div(prec_, exp_denom_), {});
}

QSeries QSeries::with_rational_coeffs() const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_) {
    if (!coeff.is_rational())
      throw DomainError("coefficient at key " + std::to_string(key) +
                        " is not rational");
    mpq_class q = coeff.rational_value();
    terms.emplace_back(key, CycNumber::rational(q.get_num(), q.get_den()));
  }
  return QSeries(Raw{}, exp_denom_, 1, low_, prec_, std::move(terms));
}

bool QSeries::operator==(const QSeries& other) const {
  return exp_denom_ == other.exp_denom_ && coeff_level_ == other.coeff_level_ &&
         low_ == other.low_ && prec_ == other.prec_ && terms_ == other.terms_;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string exponent_string(long num, long den) {
  long g = std::gcd(num < 0 ? -num : num, den);
  if (g == 0) g = 1;
  long r = num / g, s = den / g;
  if (s == 1) return std::to_string(r);
  return "(" + std::to_string(r) + "/" + std::to_string(s) + ")";
}

std::string q_power_string(long num, long den) {
  long g = std::gcd(num < 0 ? -num : num, den);
  if (g == 0) g = 1;
  long r = num / g, s = den / g;
  if (s == 1 && r == 0) return "1";
  if (s == 1 && r == 1) return "q";
  return "q^" + exponent_string(num, den);
}

std::string rational_string(const mpq_class& q) {
  std::string s = q.get_num().get_str();
  if (q.get_den() != 1) s += "/" + q.get_den().get_str();
  return s;
}

}  // namespace

std::string QSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, coeff] : terms_) {
    std::string qpart = q_power_string(key, exp_denom_);
    if (coeff.is_rational()) {
      mpq_class v = coeff.rational_value();
      bool neg = v < 0;
      mpq_class mag = neg ? mpq_class(-v) : v;
      if (first) {
        if (neg) os << '-';
        first = false;
      } else {
        os << (neg ? " - " : " + ");
      }
      if (key == 0) {
        os << rational_string(mag);
      } else if (mag == 1) {
        os << qpart;
      } else {
        os << rational_string(mag) << '*' << qpart;
      }
    } else {
      if (!first) os << " + ";
      first = false;
      os << coeff.to_compact_string() << '@' << coeff_level_;
      if (key != 0) os << '*' << qpart;
    }
  }
  if (first) os << '0';
  os << " + O(" << q_power_string(prec_, exp_denom_) << ')';
  return os.str();
}

// The parser reconstructs the exponent lattice as the lcm of all rendered
// exponent denominators and the coefficient field as the lcm of all rendered
// coefficient levels; the window lower bound is the smallest rendered key.
// These all match the original for canonical series whose lower bound is
// attained by a stored term and whose coefficient level is witnessed by some
// non-rational coefficient (or is 1), which is the round-trip contract.
QSeries QSeries::parse(std::string_view text) {
  struct PTerm {
    mpq_class coeff_rat;
    CycNumber coeff_cyc;
    bool is_cyc = false;
    long enum_ = 0;
    long eden = 1;
  };
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto peek = [&]() -> char {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  };
  auto eat = [&](char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError(msg + " at position " + std::to_string(pos) + " in \"" +
                     std::string(text) + "\"");
  };
  auto parse_int = [&]() -> mpz_class {
    skip_ws();
    size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits) fail("expected integer");
    return mpz_class(std::string(text.substr(start, pos - start)), 10);
  };
  auto parse_small = [&]() -> long {
    mpz_class v = parse_int();
    if (!v.fits_slong_p()) fail("integer too large");
    return v.get_si();
  };
  // exponent after '^': int or (r/s)
  auto parse_exponent = [&](long& num, long& den) {
    den = 1;
    if (eat('(')) {
      num = parse_small();
      if (eat('/')) den = parse_small();
      if (!eat(')')) fail("expected ')' in exponent");
    } else {
      num = parse_small();
    }
    if (den < 1) fail("exponent denominator must be positive");
  };
  // q or q^e; returns false if no q here
  auto parse_qpart = [&](long& num, long& den) -> bool {
    skip_ws();
    if (pos >= text.size() || text[pos] != 'q') return false;
    ++pos;
    num = 1;
    den = 1;
    if (eat('^')) parse_exponent(num, den);
    return true;
  };

  std::vector<PTerm> terms;
  bool have_tail = false;
  long tail_num = 0, tail_den = 1;
  bool first = true;
  for (;;) {
    skip_ws();
    int sign = 1;
    if (!first) {
      if (eat('+')) sign = 1;
      else if (eat('-')) sign = -1;
      else fail("expected '+' or '-'");
    } else if (eat('-')) {
      sign = -1;
    }
    first = false;
    skip_ws();
    // O(...) tail?
    if (pos < text.size() && text[pos] == 'O') {
      if (sign < 0) fail("tail may not be subtracted");
      ++pos;
      if (!eat('(')) fail("expected '(' after O");
      skip_ws();
      if (pos < text.size() && text[pos] == '1') {
        ++pos;
        tail_num = 0;
        tail_den = 1;
      } else {
        long n, d;
        if (!parse_qpart(n, d)) fail("expected q power in O(...)");
        tail_num = n;
        tail_den = d;
      }
      if (!eat(')')) fail("expected ')' after O(...)");
      have_tail = true;
      break;
    }
    PTerm t;
    char c = peek();
    if (c == '(') {
      // cyclotomic coefficient: span to matching ')of full compact form
      size_t start = pos;
      int depth = 0;
      size_t end = pos;
      while (end < text.size()) {
        if (text[end] == '(') ++depth;
        if (text[end] == ')') {
          --depth;
          if (depth == 0) break;
        }
        ++end;
      }
      if (depth != 0) fail("unbalanced parentheses");
      ++end;  // past ')'
      // optional /denominator
      size_t probe = end;
      auto skip_probe_ws = [&] {
        while (probe < text.size() && std::isspace(static_cast<unsigned char>(text[probe]))) ++probe;
      };
      skip_probe_ws();
      if (probe < text.size() && text[probe] == '/') {
        ++probe;
        skip_probe_ws();
        while (probe < text.size() && std::isdigit(static_cast<unsigned char>(text[probe]))) ++probe;
        end = probe;
      }
      skip_probe_ws();
      if (probe < text.size() && text[probe] == '@') {
        ++probe;
        skip_probe_ws();
        if (text.compare(probe, 5, "level") == 0) probe += 5;
        skip_probe_ws();
        while (probe < text.size() && std::isdigit(static_cast<unsigned char>(text[probe]))) ++probe;
        end = probe;
      }
      t.coeff_cyc = CycNumber::parse(text.substr(start, end - start));
      t.is_cyc = true;
      pos = end;
      if (sign < 0) t.coeff_cyc = -t.coeff_cyc;
      if (eat('*')) {
        if (!parse_qpart(t.enum_, t.eden)) fail("expected q after '*'");
      }
    } else if (c == 'q') {
      parse_qpart(t.enum_, t.eden);
      t.coeff_rat = sign;
    } else {
      mpz_class num = parse_int();
      mpz_class den(1);
      if (eat('/')) den = parse_int();
      t.coeff_rat = mpq_class(num, den);
      t.coeff_rat.canonicalize();
      if (sign < 0) t.coeff_rat = -t.coeff_rat;
      size_t save = pos;
      if (eat('*')) {
        if (!parse_qpart(t.enum_, t.eden)) {
          pos = save;
        }
      }
    }
    terms.push_back(std::move(t));
  }
  if (!have_tail) fail("missing O(...) tail");
  skip_ws();
  if (pos != text.size()) fail("trailing characters");

  long M = tail_den;
  long L = 1;
  for (const auto& t : terms) {
    M = std::lcm(M, t.eden);
    if (t.is_cyc) L = std::lcm(L, t.coeff_cyc.level());
  }
  const long prec = tail_num * (M / tail_den);
  long low = prec;
  std::vector<Term> out;
  for (const auto& t : terms) {
    const long key = t.enum_ * (M / t.eden);
    CycNumber c = t.is_cyc
                      ? t.coeff_cyc.embedded(L)
                      : CycNumber::rational(t.coeff_rat.get_num(),
                                            t.coeff_rat.get_den())
                            .embedded(L);
    if (c.is_zero()) continue;  // a written zero pins no window knowledge
    low = std::min(low, key);
    out.emplace_back(key, std::move(c));
  }
  return from_terms(M, L, low, prec, std::move(out));
}

}  // namespace modfun
