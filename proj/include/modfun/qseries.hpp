#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modfun/cyclotomic.hpp"

namespace modfun {

// A truncated Laurent series in q^(1/M) with coefficients in Q(zeta_L).
//
// Stored keys n denote exponents n/M. Coefficients are known exactly for
// every exponent below prec: zero below the support bound low, stored or zero
// on [low, prec), unknown from prec on. Every operation propagates the
// largest window on which its result is determined by the inputs, and never
// a larger one.
//
// Terms are sorted and nonzero and low always equals the first stored key
// (or prec when there is none), so equal content compares structurally
// equal. The exponent lattice is reduced only by substitute_up; align
// lattices with promoted() before comparing series from different paths.
class QSeries {
 public:
  using Term = std::pair<long, CycNumber>;

  QSeries();  // zero series, M = L = 1, empty window [0, 0)

  static QSeries zero(long exp_denom, long coeff_level, long low, long prec);
  static QSeries monomial(CycNumber coeff, long key, long exp_denom, long low,
                          long prec);
  // General constructor; merges duplicate keys, drops zeros, embeds
  // coefficients into coeff_level, validates the window, canonicalizes.
  static QSeries from_terms(long exp_denom, long coeff_level, long low,
                            long prec, std::vector<Term> terms);

  long exp_denom() const { return exp_denom_; }
  long coeff_level() const { return coeff_level_; }
  long low() const { return low_; }
  long prec() const { return prec_; }
  const std::vector<Term>& terms() const { return terms_; }

  bool has_terms() const { return !terms_.empty(); }
  std::optional<long> leading_key() const;
  // Coefficient at key; zero when the key is certified zero, throws
  // PrecisionError beyond the window.
  CycNumber coeff(long key) const;

  // Same series on a finer exponent lattice / larger coefficient field.
  QSeries promoted(long new_exp_denom, long new_coeff_level) const;
  // Window capped to new_prec (no-op if already smaller).
  QSeries truncated(long new_prec) const;

  QSeries operator-() const;
  friend QSeries operator+(const QSeries& a, const QSeries& b);
  friend QSeries operator-(const QSeries& a, const QSeries& b);
  friend QSeries operator*(const QSeries& a, const QSeries& b);
  QSeries& operator+=(const QSeries& b) { return *this = *this + b; }
  QSeries& operator-=(const QSeries& b) { return *this = *this - b; }
  QSeries& operator*=(const QSeries& b) { return *this = *this * b; }

  QSeries scaled(const CycNumber& c) const;
  // e >= 1, by repeated squaring (window tracking matches the e-fold product).
  QSeries pow(long e) const;

  // Multiplicative inverse of a series whose lowest stored coefficient is a
  // unit; the result window is the exact attainable one.
  QSeries invert_unit() const;

  // Expansion of tau |-> f(tau/p): pure exponent relabelling q^(n/M) to
  // q^(n/(Mp)).
  QSeries rescale_to_subtau(long p) const;
  // Expansion of tau |-> f(m*tau): stored keys multiply by m.
  QSeries substitute_up(long m) const;
  // Expansion of tau |-> f((tau+k)/p): exponent n/M goes to n/(Mp) and the
  // coefficient picks up the root of unity zeta_{Mp}^{nk}.
  QSeries twist_shift(long k, long p) const;
  // Galois action zeta_L -> zeta_L^d applied to every coefficient.
  QSeries galois_on_coeffs(long d) const;

  bool all_coeffs_integral() const;
  bool all_coeffs_divisible_by(const mpz_class& p) const;
  // min over stored coefficients of the exact power of p dividing them;
  // nullopt for a series with no terms.
  std::optional<long> min_p_power(const mpz_class& p) const;

  // Checks f^p = (coefficient-wise p-th power of f)(p*tau) mod p on the
  // common certified window; a testable oracle that must hold for integral
  // coefficients.
  bool pth_power_frobenius_check(long p) const;

  // The series as one with integer exponents (exp_denom 1); throws
  // DomainError if fractional exponents remain.
  QSeries with_integer_exponents() const;
  // The series with every coefficient recognized as rational and relabelled
  // to coefficient level 1; throws DomainError otherwise.
  QSeries with_rational_coeffs() const;

  bool operator==(const QSeries& other) const;
  bool operator!=(const QSeries& other) const { return !(*this == other); }

  // Text form "q^-1 + 744 + 196884*q + O(q^2)"; see parse() for the
  // round-trip contract.
  std::string to_string() const;
  static QSeries parse(std::string_view text);

 private:
  struct Raw {};
  QSeries(Raw, long exp_denom, long coeff_level, long low, long prec,
          std::vector<Term> terms);
  void canonicalize_lattice();

  long exp_denom_;
  long coeff_level_;
  long low_;
  long prec_;
  std::vector<Term> terms_;
};

}  // namespace modfun
