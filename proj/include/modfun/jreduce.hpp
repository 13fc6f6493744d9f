#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modfun/modforms.hpp"

namespace modfun {

// A polynomial in the level-1 function j with exact coefficients,
// index = power of j. Trailing coefficient nonzero unless zero polynomial.
struct JPolynomial {
  std::vector<CycNumber> coeffs;

  static JPolynomial zero() { return {}; }
  static JPolynomial from_coeffs(std::vector<CycNumber> cs);

  long degree() const { return static_cast<long>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.empty(); }
  bool is_one() const;
  bool all_integral() const;
  bool operator==(const JPolynomial&) const = default;

  // Evaluate on a j-series (used by the reduction round-trip identity).
  QSeries evaluated(const QSeries& j_series) const;

  std::string to_string() const;  // "j^2 - 1488*j + 162000"
};

struct JReduction {
  JPolynomial poly;
  QSeries remainder;  // O(q) when the input was a polynomial in j
};

// Greedy highest-pole-first elimination: repeatedly subtract c*j^m against
// the deepest surviving pole, then the constant term. The input must have
// integer exponents; the j-series window must reach m - 1 beyond the input
// window for a pole of order m.
JReduction reduce_to_j_polynomial(const QSeries& f, const QSeries& j_series);

// Orbit of a torsion label under the unimodular action (generated by S, T).
std::vector<FrickeIndex> fricke_orbit(const FrickeIndex& v);

// Coefficients of prod_{u in orbit} (x - f_u) as polynomials in j, listed
// from x^t down to x^0; the leading entry is the constant polynomial 1.
// prec is the window bound of the orbit expansions in 1/N units. Throws if
// any reduction leaves a nonvanishing remainder.
std::vector<JPolynomial> orbit_char_poly(const FrickeIndex& v, long prec);

struct CertificateWitness {
  long symmetric_index;  // which coefficient of the product failed
  long j_power;
  std::string coefficient;
};

struct IntegralityCertificate {
  std::string subject;
  std::vector<JPolynomial> char_poly;  // monic: first entry is 1
  bool all_integral = false;
  std::optional<CertificateWitness> witness;
};

// Builds prod (x - g_i) over the given closed orbit of expansions, reduces
// every coefficient to a polynomial in j and reports whether all of their
// coefficients are algebraic integers, with the first counterexample as a
// witness. Expansions must share an exponent lattice refinable to integers.
IntegralityCertificate integrality_certificate(std::string subject,
                                               const std::vector<QSeries>& orbit);

}  // namespace modfun
