#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modfun/errors.hpp"

namespace modfun {

// Dense integer polynomial, little-endian coefficients (index = degree).
using ZPoly = std::vector<mpz_class>;

long euler_phi(long m);
long mobius(long m);
std::vector<long> divisors(long m);

// The m-th cyclotomic polynomial, computed by the Moebius product
// prod_{d|m} (x^{m/d} - 1)^{mu(d)} with exact polynomial division.
ZPoly cyclotomic_polynomial(long m);

// Per-level tables: the cyclotomic polynomial and the reduced powers of the
// root of unity. Contexts are built once per level, cached process-wide and
// never destroyed, so raw pointers to them stay valid.
class CycContext {
 public:
  static const CycContext& get(long level);

  long level() const { return level_; }
  long degree() const { return degree_; }
  const ZPoly& modulus() const { return phi_; }

  // zeta_power(j) = coordinates of zeta^j in the power basis, any j (mod level).
  const std::vector<mpz_class>& zeta_power(long j) const;

 private:
  explicit CycContext(long level);

  long level_;
  long degree_;
  ZPoly phi_;
  // power_[j] = x^j mod phi for 0 <= j < max(level, 2*degree - 1).
  std::vector<std::vector<mpz_class>> power_;

  friend class CycNumber;
  friend class RawProductAccumulator;
};

// An element of Q(zeta_M), stored as phi(M) integer coordinates in the power
// basis 1, zeta, ..., zeta^{phi(M)-1} over a single positive denominator.
// Values are normalized (gcd of coordinates and denominator is 1) and
// immutable; equality is structural.
class CycNumber {
 public:
  CycNumber();  // zero at level 1

  static CycNumber zero(long level);
  static CycNumber one(long level);
  static CycNumber integer(mpz_class n);                      // level 1
  static CycNumber rational(mpz_class num, mpz_class den);    // level 1
  static CycNumber root_of_unity(long level, long power);     // zeta_M^k
  static CycNumber from_coords(long level, std::vector<mpz_class> coords,
                               mpz_class denom = 1);

  long level() const { return ctx_->level(); }
  const std::vector<mpz_class>& coords() const { return coords_; }
  const mpz_class& denom() const { return denom_; }

  bool is_zero() const;
  bool is_one() const;
  bool is_integral() const { return denom_ == 1; }
  bool is_rational() const;
  // Value as a rational number; requires is_rational().
  mpq_class rational_value() const;

  CycNumber operator-() const;
  friend CycNumber operator+(const CycNumber& a, const CycNumber& b);
  friend CycNumber operator-(const CycNumber& a, const CycNumber& b);
  friend CycNumber operator*(const CycNumber& a, const CycNumber& b);
  friend CycNumber operator/(const CycNumber& a, const CycNumber& b);
  CycNumber& operator+=(const CycNumber& b) { return *this = *this + b; }
  CycNumber& operator-=(const CycNumber& b) { return *this = *this - b; }
  CycNumber& operator*=(const CycNumber& b) { return *this = *this * b; }

  bool operator==(const CycNumber& other) const;
  bool operator!=(const CycNumber& other) const { return !(*this == other); }

  // Exact inverse via the extended Euclidean algorithm against the
  // cyclotomic modulus. Throws DivisionByZeroError on zero.
  CycNumber inverse() const;
  CycNumber pow(long e) const;

  // The same field element in the power basis of the larger field
  // Q(zeta_target), where level | target.
  CycNumber embedded(long target_level) const;
  // Partial inverse of embedded(): recognizes elements of the subfield
  // Q(zeta_target) for target | level. nullopt when the element is not there.
  std::optional<CycNumber> lowered(long target_level) const;

  // The Galois image under zeta |-> zeta^d; requires gcd(d, level) = 1.
  CycNumber galois(long d) const;

  // Membership in p*Z[zeta]: coordinate-wise divisibility.
  // Requires an algebraic integer (denom == 1).
  bool divisible_by(const mpz_class& p) const;
  // min over nonzero coordinates of the p-adic valuation; nullopt for zero.
  // Requires an algebraic integer.
  std::optional<long> min_coord_valuation(const mpz_class& p) const;

  // Text form "(1 + 2*z^3)/5 @ level 12"; parse() round-trips bit-exactly.
  std::string to_string() const;
  // Compact coefficient form "(1 + 2*z^3)/5@12" used inside series.
  std::string to_compact_string() const;
  static CycNumber parse(std::string_view text);

 private:
  CycNumber(const CycContext* ctx, std::vector<mpz_class> coords,
            mpz_class denom, bool normalized);
  void normalize();

  const CycContext* ctx_;
  std::vector<mpz_class> coords_;  // length ctx_->degree()
  mpz_class denom_;                // >= 1

  friend class RawProductAccumulator;
};

// Accumulates sums of raw coordinate products of integral values at one
// level, folding through the cyclotomic modulus only once at the end.
// This is the hot path of series multiplication.
class RawProductAccumulator {
 public:
  explicit RawProductAccumulator(const CycContext& ctx);
  // *this += a * b. Both operands must be integral and live at ctx's level.
  void add_product(const CycNumber& a, const CycNumber& b);
  bool touched() const { return touched_; }
  CycNumber reduce() const;

 private:
  const CycContext* ctx_;
  std::vector<mpz_class> raw_;  // length 2*degree - 1
  bool touched_ = false;
};

// The p-th power Frobenius congruence c^p = galois(c, p) (mod p) for
// algebraic integers c; exists as a testable oracle and must return true
// whenever p does not divide the level.
bool frobenius_residue_check(const CycNumber& c, long p);

}  // namespace modfun
