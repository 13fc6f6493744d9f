#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "modfun/jreduce.hpp"
#include "modfun/transform.hpp"

namespace modfun {

enum class VerifyMode { CuspInfinity, AllCosets, Sampled };

std::string to_string(VerifyMode mode);

// Outcome of the divisibility scan of one cusp expansion.
struct CuspResult {
  Mat2 alpha;
  int branch = 0;               // expansion branch taken (1 or 2)
  bool divisible = false;       // every certified coefficient in p*Z[zeta]
  std::optional<long> margin;   // min exact power of p over coefficients;
                                // nullopt when the product vanished
  long window_lo = 0;           // window in 1/(Np) units
  long window_hi = 0;
  std::string first_fail;       // empty when divisible
};

struct CongruenceReport {
  std::string subject;
  long N = 1;
  long p = 2;
  VerifyMode mode = VerifyMode::CuspInfinity;
  unsigned long seed = 0;
  long sample_count = 0;
  long precision_target = 0;    // certified coefficient slots per cusp
  bool negative_control = false;
  bool hypothesis_ok = true;    // p = +-1 (mod N)
  std::vector<CuspResult> per_cusp;
  bool pass = false;
  std::optional<long> min_margin;
  long certified_min = 0;
  long case1_count = 0;
  long case2_count = 0;

  std::string to_text() const;
  std::string to_json_string() const;  // structured document, stable names
};

// Exact expansion of the scaled product
//   ( (f_p)^p - f[1 0; 0 p] ) * ( f_p - (f[1 0; 0 p])^p )
// composed with alpha, on the certified window the sizing rule produces for
// target_coeffs certified slots. This is p times the function whose
// integrality the congruence asserts.
QSeries congruence_witness_cusp(const Subject& f, const Mat2& alpha, long p,
                                long target_coeffs,
                                bool allow_any_residue = false);

// The same product pre-composed with the argument scaling tau -> p tau,
// built independently from the infinite-cusp expansion.
QSeries congruence_witness_scaled(const Subject& f, long p, long target_coeffs);

// Sweeps the chosen cusps, divides every certified coefficient by p, and
// aggregates the outcome. threads = 0 picks the hardware count.
CongruenceReport verify_congruence(const Subject& f, long p, VerifyMode mode,
                                   long target_coeffs = 50,
                                   unsigned long seed = 1,
                                   long sample_count = 64,
                                   bool negative_control = false,
                                   int threads = 0);

// Largest coset sweep allowed before verify falls back to sampling.
inline constexpr long kAllCosetsCap = 5000;

// The classical two-variable modular relation between j(tau) and j(p tau).
struct ModularPolynomial {
  long p = 2;
  std::map<std::pair<long, long>, mpz_class> coeffs;  // (i, k) -> x^i y^k

  mpz_class coeff(long i, long k) const;
  bool is_symmetric() const;
  bool is_monic_in_x() const;
  long degree() const { return p + 1; }
  // (i, k, coefficient) triples in lexicographic order
  std::vector<std::tuple<long, long, mpz_class>> triples() const;
  std::string to_text() const;
};

// Built from the p+1 cusp expansions of j(p tau); window is the j-series
// bound used (the default suits p in {2, 3}; p = 5 needs at least 70).
ModularPolynomial modular_polynomial(long p, long window = 60);

// Phi_p(x, y) = (x^p - y)(x - y^p) (mod p): the classical congruence.
bool kronecker_classical_check(const ModularPolynomial& Phi);

}  // namespace modfun
