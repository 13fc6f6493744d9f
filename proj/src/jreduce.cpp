#include "modfun/jreduce.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "modfun/transform.hpp"

namespace modfun {

JPolynomial JPolynomial::from_coeffs(std::vector<CycNumber> cs) {
  while (!cs.empty() && cs.back().is_zero()) cs.pop_back();
  return {std::move(cs)};
}

bool JPolynomial::is_one() const {
  return coeffs.size() == 1 && coeffs[0].is_one();
}

bool JPolynomial::all_integral() const {
  return std::all_of(coeffs.begin(), coeffs.end(),
                     [](const CycNumber& c) { return c.is_integral(); });
}

QSeries JPolynomial::evaluated(const QSeries& j_series) const {
  QSeries acc;  // zero with empty window; fixed up below
  bool any = false;
  QSeries jpow = j_series;  // j^m, built incrementally from m = 1
  for (size_t m = 0; m < coeffs.size(); ++m) {
    if (m >= 2) jpow = jpow * j_series;
    if (coeffs[m].is_zero()) continue;
    QSeries term = m == 0 ? QSeries::monomial(coeffs[m], 0, 1, 0, j_series.prec())
                          : jpow.scaled(coeffs[m]);
    acc = any ? acc + term : term;
    any = true;
  }
  if (!any) return QSeries::zero(1, 1, 0, j_series.prec());
  return acc;
}

std::string JPolynomial::to_string() const {
  if (coeffs.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (long m = degree(); m >= 0; --m) {
    const CycNumber& c = coeffs[static_cast<size_t>(m)];
    if (c.is_zero()) continue;
    std::string jpart = m == 0 ? "" : (m == 1 ? "j" : "j^" + std::to_string(m));
    if (c.is_rational()) {
      mpq_class v = c.rational_value();
      bool neg = v < 0;
      mpq_class mag = neg ? mpq_class(-v) : v;
      os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
      std::string mags = mag.get_num().get_str();
      if (mag.get_den() != 1) mags += "/" + mag.get_den().get_str();
      if (m == 0) {
        os << mags;
      } else if (mag == 1) {
        os << jpart;
      } else {
        os << mags << "*" << jpart;
      }
    } else {
      os << (first ? "" : " + ") << c.to_compact_string() << "@" << c.level();
      if (m > 0) os << "*" << jpart;
    }
    first = false;
  }
  return os.str();
}

JReduction reduce_to_j_polynomial(const QSeries& f, const QSeries& j_series) {
  if (f.exp_denom() != 1)
    throw DomainError("reduction requires integer exponents");
  if (j_series.exp_denom() != 1 || !j_series.leading_key() ||
      *j_series.leading_key() != -1)
    throw DomainError("reduction needs a level-1 j-series with leading key -1");
  QSeries work = f;
  std::map<long, CycNumber> poly;
  // cache of j powers
  std::vector<QSeries> jpow = {j_series};
  auto j_power = [&](long m) -> const QSeries& {
    while (static_cast<long>(jpow.size()) < m) jpow.push_back(jpow.back() * j_series);
    return jpow[static_cast<size_t>(m - 1)];
  };
  for (;;) {
    auto lead = work.leading_key();
    if (!lead || *lead >= 0) break;
    const long m = -*lead;
    if (j_series.prec() < work.prec() + m - 1)
      throw PrecisionError(
          "j-series window too small to cancel a pole of order " +
          std::to_string(m));
    CycNumber c = work.coeff(*lead);
    work = work - j_power(m).scaled(c);
    if (work.leading_key() && *work.leading_key() <= -m)
      throw Error("pole elimination failed to make progress");
    auto it = poly.find(m);
    if (it == poly.end())
      poly.emplace(m, c);
    else
      it->second += c;
  }
  if (work.prec() < 1)
    throw PrecisionError("window too small to resolve the constant term");
  CycNumber c0 = work.coeff(0);
  if (!c0.is_zero()) {
    work = work - QSeries::monomial(c0, 0, 1, 0, work.prec());
    poly[0] = poly.count(0) ? poly[0] + c0 : c0;
  }
  long deg = poly.empty() ? -1 : poly.rbegin()->first;
  std::vector<CycNumber> coeffs;
  if (deg >= 0) {
    long level = 1;
    for (const auto& [m, c] : poly) level = std::lcm(level, c.level());
    coeffs.assign(static_cast<size_t>(deg) + 1, CycNumber::zero(level));
    for (const auto& [m, c] : poly) coeffs[static_cast<size_t>(m)] = c.embedded(level);
  }
  return {JPolynomial::from_coeffs(std::move(coeffs)), std::move(work)};
}

std::vector<FrickeIndex> fricke_orbit(const FrickeIndex& v) {
  const Mat2 S{0, -1, 1, 0};
  const Mat2 T{1, 1, 0, 1};
  std::set<FrickeIndex> seen{v};
  std::vector<FrickeIndex> queue{v};
  while (!queue.empty()) {
    FrickeIndex u = queue.back();
    queue.pop_back();
    for (const Mat2& g : {S, T}) {
      FrickeIndex w = fricke_sl2_action(u, g);
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  return {seen.begin(), seen.end()};
}

namespace {

// Coefficients of prod (x - g_i), from x^t down to x^0, as series.
std::vector<QSeries> symmetric_coefficients(const std::vector<QSeries>& orbit) {
  const long kBig = 1L << 40;
  std::vector<QSeries> a;
  a.push_back(QSeries::from_terms(1, 1, 0, kBig, {{0, CycNumber::integer(1)}}));
  for (const QSeries& r : orbit) {
    std::vector<QSeries> next(a.size() + 1, QSeries());
    next[0] = a[0];
    for (size_t i = 1; i < a.size(); ++i) next[i] = a[i] - r * a[i - 1];
    next[a.size()] = -(r * a.back());
    a = std::move(next);
  }
  return a;
}

std::vector<JPolynomial> reduce_symmetric(const std::vector<QSeries>& sym) {
  // index 0 is the structural leading 1; the rest carry content
  if (sym.empty() || !sym[0].has_terms() || !sym[0].coeff(0).is_one() ||
      sym[0].terms().size() != 1)
    throw Error("symmetric coefficient list is not monic");
  // shared j-series sized for the deepest pole among all coefficients
  long max_pole = 0;
  long max_end = 2;
  std::vector<QSeries> flat;
  flat.reserve(sym.size() - 1);
  for (size_t i = 1; i < sym.size(); ++i) {
    QSeries s = sym[i].substitute_up(1).with_integer_exponents().with_rational_coeffs();
    if (s.leading_key() && *s.leading_key() < -max_pole) max_pole = -*s.leading_key();
    max_end = std::max(max_end, s.prec());
    flat.push_back(std::move(s));
  }
  QSeries j = j_expansion(max_end + max_pole + 2);
  std::vector<JPolynomial> out;
  out.reserve(sym.size());
  out.push_back(JPolynomial::from_coeffs({CycNumber::integer(1)}));
  for (size_t i = 0; i < flat.size(); ++i) {
    JReduction red = reduce_to_j_polynomial(flat[i], j);
    if (red.remainder.has_terms())
      throw Error("nonvanishing reduction remainder at symmetric coefficient " +
                  std::to_string(i + 1) + " (precision shortfall or normalization bug)");
    if (red.remainder.prec() < 2)
      throw PrecisionError("remainder window too small to certify vanishing");
    out.push_back(std::move(red.poly));
  }
  return out;
}

}  // namespace

std::vector<JPolynomial> orbit_char_poly(const FrickeIndex& v, long prec) {
  std::vector<FrickeIndex> orbit = fricke_orbit(v);
  std::vector<QSeries> expansions;
  expansions.reserve(orbit.size());
  for (const FrickeIndex& u : orbit) expansions.push_back(fricke_expansion(u, prec));
  return reduce_symmetric(symmetric_coefficients(expansions));
}

IntegralityCertificate integrality_certificate(std::string subject,
                                               const std::vector<QSeries>& orbit) {
  IntegralityCertificate cert;
  cert.subject = std::move(subject);
  cert.char_poly = reduce_symmetric(symmetric_coefficients(orbit));
  cert.all_integral = true;
  for (size_t i = 0; i < cert.char_poly.size() && cert.all_integral; ++i) {
    const JPolynomial& p = cert.char_poly[i];
    for (long m = 0; m <= p.degree(); ++m) {
      const CycNumber& c = p.coeffs[static_cast<size_t>(m)];
      if (!c.is_integral()) {
        cert.all_integral = false;
        cert.witness = CertificateWitness{static_cast<long>(i), m, c.to_string()};
        break;
      }
    }
  }
  return cert;
}

}  // namespace modfun
