#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modfun/qseries.hpp"

namespace modfun {

// Label of a nonzero N-torsion point v = (a/N, b/N), canonical modulo +-1
// (the attached function is even in v). N >= 2 and (a, b) != (0, 0) mod N.
struct FrickeIndex {
  long N;
  long a;
  long b;

  FrickeIndex(long N, long a, long b);
  bool operator==(const FrickeIndex&) const = default;
  std::string to_string() const;
};
bool operator<(const FrickeIndex& x, const FrickeIndex& y);

// All nonzero torsion labels at level N modulo +-1, sorted.
std::vector<FrickeIndex> all_fricke_indices(long N);

// q * prod (1-q^n)^24, integer coefficients, certified window [1, prec).
QSeries delta_tilde(long prec);

// E_4 = 1 + 240 sum sigma_3(n) q^n or E_6 = 1 - 504 sum sigma_5(n) q^n.
QSeries eisenstein(int weight, long prec);

// j = E_4^3 / delta_tilde, certified window [-1, prec). Memoized.
QSeries j_expansion(long prec);

// The normalized Weierstrass series at z = (a/N) tau + b/N, exponents in
// (1/N)Z, coefficients in Q(zeta_N), window [0, prec) in 1/N units:
//   1/12 + w/(1-w)^2
//     + sum_{n>=1} [ q^n w/(1-q^n w)^2 + q^n w^-1/(1-q^n w^-1)^2
//                    - 2 q^n/(1-q^n)^2 ]
// with w = zeta_N^b q^(a/N). The raw entry point takes uncanonicalized
// labels (used to exercise evenness in v); the index overload canonicalizes.
QSeries weierstrass_p_expansion_raw(long N, long a, long b, long prec);
QSeries weierstrass_p_expansion(const FrickeIndex& v, long prec);

// The weight-0 torsion-value function attached to v: 12 * E4*E6/delta * P
// where P is the Weierstrass series above. Exponents in (1/N)Z, window
// upper bound prec in 1/N units. Memoized per (v, prec).
QSeries fricke_expansion(const FrickeIndex& v, long prec);

// prod eta(m tau)^e with total weight zero (sum of exponents is 0).
struct EtaQuotientSpec {
  std::vector<std::pair<long, long>> factors;  // (m, e), merged and sorted

  explicit EtaQuotientSpec(std::vector<std::pair<long, long>> raw);
  long leading_numerator_24() const;  // sum m*e, the leading exponent * 24
  std::string to_string() const;
  bool operator==(const EtaQuotientSpec&) const = default;
};

// Exact expansion; the exponent lattice is (1/M)Z with
// M = 24/gcd(sum m*e, 24), and prec is the window bound in 1/M units.
QSeries eta_quotient_expansion(const EtaQuotientSpec& spec, long prec);

// A concrete modular function a pipeline can expand: the level-1 function j,
// a torsion-value function, or an eta quotient (expandable at the infinite
// cusp only).
class Subject {
 public:
  enum class Kind { J, Fricke, Eta };

  static Subject j();
  // scale multiplies the function by a fixed rational integer; the torsion
  // subjects at levels with a ramified torsion constant (N = 5, say) need a
  // small multiple to be integral, and the certificate machinery checks it.
  static Subject fricke(FrickeIndex v, long scale = 1);
  static Subject eta(EtaQuotientSpec spec, long declared_level);

  Kind kind() const { return kind_; }
  long level() const { return level_; }
  long scale() const { return scale_; }
  const FrickeIndex& index() const;
  const EtaQuotientSpec& eta_spec() const;
  // Can the expansion of subject∘alpha be produced for alpha != I?
  bool transformable() const { return kind_ != Kind::Eta; }
  // Exponent lattice denominator of the expansion at the infinite cusp.
  long natural_denom() const;
  // Expansion at the infinite cusp, window bound in natural_denom units.
  QSeries expansion(long prec) const;
  std::string description() const { return description_; }

 private:
  Kind kind_;
  long level_;
  long scale_ = 1;
  std::optional<FrickeIndex> index_;
  std::optional<EtaQuotientSpec> eta_;
  std::string description_;

  Subject(Kind k, long level) : kind_(k), level_(level) {}
};

}  // namespace modfun
