#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modfun/qseries.hpp"

namespace modfun {

// A prime of Z[zeta_M] above the unramified rational prime p (p does not
// divide M), represented by a monic irreducible-mod-p factor of the M-th
// cyclotomic polynomial, Hensel-lifted to modulus p^lift_precision.
struct PrimeIdealData {
  long p;
  long M;
  long residue_degree;            // multiplicative order of p mod M
  std::vector<mpz_class> factor;  // monic, degree = residue_degree
  long lift_precision;            // k
  mpz_class modulus;              // p^k

  std::string to_string() const;  // "(p, h mod p)"
};

// All primes of Z[zeta_M] above p, one per irreducible factor of the
// cyclotomic polynomial mod p; phi(M)/f of them, deterministically ordered.
std::vector<PrimeIdealData> primes_above(long p, long M, long lift_precision = 8);

// The same prime lifted to a deeper modulus (valuations < new_precision
// become certifiable).
PrimeIdealData deepen_lift(const PrimeIdealData& P, long new_precision);

// The exponential valuation of a at P; nullopt encodes infinity (a = 0).
// Throws PrecisionError when the answer would reach lift_precision.
std::optional<long> vP_element(const CycNumber& a, const PrimeIdealData& P);

// min over certified coefficients of vP_element; nullopt for a series with
// no terms. Coefficients must be algebraic integers at level P.M.
std::optional<long> wP_series(const QSeries& g, const PrimeIdealData& P);

}  // namespace modfun
