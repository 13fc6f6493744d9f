#pragma once

#include <string>
#include <vector>

#include "modfun/modforms.hpp"

namespace modfun {

struct Mat2 {
  long a = 1, b = 0, c = 0, d = 1;

  long det() const { return a * d - b * c; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
  }
  bool operator==(const Mat2&) const = default;
  std::string to_string() const;
};

inline Mat2 mat2_identity() { return {1, 0, 0, 1}; }

// Right action on torsion labels: v |-> v * alpha (mod N, mod +-1).
// alpha must be unimodular.
FrickeIndex fricke_sl2_action(const FrickeIndex& v, const Mat2& alpha);

// A lift of the residue matrix [a b; c d] (det = 1 mod M) to an integer
// matrix of determinant one.
Mat2 sl2_lift(long a, long b, long c, long d, long M);

// One unimodular lift per element of SL2(Z/MZ), identity first, then
// lexicographic in the residue entries. The count is M^3 prod (1 - l^-2).
std::vector<Mat2> coset_representatives(long M);
long sl2_order(long M);

// The two expansion branches for f(tau/p) composed with alpha = [a b; c d]:
// when p | a the matrix [a/p, b; c, p d] is unimodular and the expansion is
// a key substitution by p; otherwise, with k the least nonnegative solution
// of a k = b (mod p), the matrix [a, (b - a k)/p; p c, d - c k] is unimodular
// and the expansion is a twist by (k, p).
struct CuspBranch {
  int branch;  // 1: p | a, 2: p does not divide a
  Mat2 gamma;  // the unimodular inner matrix, det asserted 1
  long k;      // branch 2 twist offset, 0 in branch 1
};
CuspBranch decompose_fp_cusp(const Mat2& alpha, long p);

// Label of the function whose plain expansion, followed by the coefficient
// Galois action d = p, gives the operand (f [1 0; 0 p]) composed with alpha.
FrickeIndex galois_operand_index(const FrickeIndex& v, const Mat2& alpha, long p);

// Expansion of (f_p) composed with alpha, exact on the propagated window.
// prec bounds the window of the inner level-N expansion in 1/N units.
// Requires p = +-1 (mod N) unless allow_any_residue (the observational mode);
// p must not divide N in any case. Eta subjects transform only at alpha = I.
QSeries cusp_expansion_fp(const Subject& f, const Mat2& alpha, long p,
                          long prec, bool allow_any_residue = false);

// Expansion of (f [1 0; 0 p]) composed with alpha: expand the conjugated
// label, then apply the coefficient Galois action with d = p.
QSeries cusp_expansion_galois_operand(const Subject& f, const Mat2& alpha,
                                      long p, long prec);

}  // namespace modfun
