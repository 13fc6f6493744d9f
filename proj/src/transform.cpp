#include "modfun/transform.hpp"

#include <numeric>
#include <sstream>

namespace modfun {

namespace {

long positive_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

// x with a x = 1 (mod m); gcd(a, m) must be 1.
long mod_inverse(long a, long m) {
  if (m == 1) return 0;
  long r0 = m, r1 = positive_mod(a, m);
  long t0 = 0, t1 = 1;
  while (r1 != 0) {
    long q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    t0 -= q * t1;
    std::swap(t0, t1);
  }
  if (r0 != 1) throw DomainError("element is not invertible modulo " + std::to_string(m));
  return positive_mod(t0, m);
}

void require_unimodular(const Mat2& alpha) {
  if (alpha.det() != 1)
    throw DomainError("matrix " + alpha.to_string() + " is not unimodular");
}

}  // namespace

std::string Mat2::to_string() const {
  std::ostringstream os;
  os << "[" << a << " " << b << "; " << c << " " << d << "]";
  return os.str();
}

FrickeIndex fricke_sl2_action(const FrickeIndex& v, const Mat2& alpha) {
  require_unimodular(alpha);
  return FrickeIndex(v.N, v.a * alpha.a + v.b * alpha.c,
                     v.a * alpha.b + v.b * alpha.d);
}

Mat2 sl2_lift(long a, long b, long c, long d, long M) {
  if (M < 1) throw DomainError("modulus must be positive");
  if (M == 1) return mat2_identity();
  a = positive_mod(a, M);
  b = positive_mod(b, M);
  c = positive_mod(c, M);
  d = positive_mod(d, M);
  if (positive_mod(a * d - b * c, M) != 1)
    throw DomainError("residue matrix does not have determinant 1");
  // bottom row (c', d') congruent to (c, d) with gcd 1
  long cc = c == 0 ? M : c;
  long dd = d;
  while (std::gcd(cc, dd) != 1) dd += M;
  // fix the top row: a' d' - b' c' = 1 with a' = a + M x, b' = b + M y
  const long g = a * dd - b * cc;  // g = 1 (mod M)
  const long t0 = (1 - g) / M;
  // u dd + v cc = 1
  long r0 = dd, r1 = cc, u0 = 1, u1 = 0, v0 = 0, v1 = 1;
  while (r1 != 0) {
    long q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    u0 -= q * u1;
    std::swap(u0, u1);
    v0 -= q * v1;
    std::swap(v0, v1);
  }
  // r0 = gcd = +-1
  if (r0 == -1) {
    u0 = -u0;
    v0 = -v0;
  } else if (r0 != 1) {
    throw Error("sl2 lift: bottom row not coprime");
  }
  // x dd - y cc = t0
  const long x = u0 * t0;
  const long y = -v0 * t0;
  Mat2 out{a + M * x, b + M * y, cc, dd};
  if (out.det() != 1) throw Error("sl2 lift produced a non-unimodular matrix");
  return out;
}

long sl2_order(long M) {
  long order = M * M * M;
  long n = M;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      order = order / (p * p) * (p * p - 1);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) order = order / (n * n) * (n * n - 1);
  return order;
}

std::vector<Mat2> coset_representatives(long M) {
  if (M < 1) throw DomainError("modulus must be positive");
  std::vector<Mat2> out;
  out.push_back(mat2_identity());
  if (M == 1) return out;
  out.reserve(static_cast<size_t>(sl2_order(M)));
  for (long a = 0; a < M; ++a)
    for (long b = 0; b < M; ++b)
      for (long c = 0; c < M; ++c)
        for (long d = 0; d < M; ++d) {
          if (positive_mod(a * d - b * c, M) != 1) continue;
          if (a == 1 && b == 0 && c == 0 && d == 1) continue;  // identity is first
          out.push_back(sl2_lift(a, b, c, d, M));
        }
  if (static_cast<long>(out.size()) != sl2_order(M))
    throw Error("SL2 enumeration does not match the order formula");
  return out;
}

CuspBranch decompose_fp_cusp(const Mat2& alpha, long p) {
  require_unimodular(alpha);
  if (p < 2) throw DomainError("p must be a prime");
  CuspBranch out{};
  if (alpha.a % p == 0) {
    out.branch = 1;
    out.gamma = Mat2{alpha.a / p, alpha.b, alpha.c, p * alpha.d};
    out.k = 0;
  } else {
    out.branch = 2;
    const long ainv = mod_inverse(positive_mod(alpha.a, p), p);
    out.k = positive_mod(positive_mod(alpha.b, p) * ainv, p);
    out.gamma = Mat2{alpha.a, (alpha.b - alpha.a * out.k) / p, p * alpha.c,
                     alpha.d - alpha.c * out.k};
  }
  if (out.gamma.det() != 1)
    throw Error("cusp decomposition produced a non-unimodular matrix");
  return out;
}

FrickeIndex galois_operand_index(const FrickeIndex& v, const Mat2& alpha, long p) {
  require_unimodular(alpha);
  const long N = v.N;
  if (std::gcd(positive_mod(p, N), N) != 1 && N != 1)
    throw DomainError("p divides the level");
  // u = v diag(1,p) alpha, then undo the diagonal part on the right
  const long ua = v.a * alpha.a + p * v.b * alpha.c;
  const long ub = v.a * alpha.b + p * v.b * alpha.d;
  const long pinv = mod_inverse(positive_mod(p, N), N);
  return FrickeIndex(N, ua, ub * pinv);
}

namespace {

QSeries scaled_for(const Subject& f, QSeries e) {
  if (f.scale() == 1) return e;
  return e.scaled(CycNumber::integer(f.scale()).embedded(e.coeff_level()));
}

// expansion of f composed with the unimodular gamma
QSeries inner_expansion(const Subject& f, const Mat2& gamma, long prec) {
  switch (f.kind()) {
    case Subject::Kind::J:
      return j_expansion(prec);  // invariant under the full group
    case Subject::Kind::Fricke:
      return scaled_for(
          f, fricke_expansion(fricke_sl2_action(f.index(), gamma), prec));
    case Subject::Kind::Eta: {
      // only +-identity: no multiplier system machinery is in scope
      const bool minus_id =
          gamma.a == -1 && gamma.b == 0 && gamma.c == 0 && gamma.d == -1;
      if (!(gamma == mat2_identity() || minus_id))
        throw DomainError("eta quotients transform only at the identity cusp");
      return f.expansion(prec);
    }
  }
  throw Error("unreachable");
}

void check_residue_hypothesis(long N, long p, bool allow_any_residue) {
  if (N == 1) return;
  if (p % N == 0 || std::gcd(p, N) != 1)
    throw DomainError("p divides the level");
  const long r = positive_mod(p, N);
  if (r != 1 && r != positive_mod(-1, N)) {
    if (!allow_any_residue)
      throw HypothesisError("p = " + std::to_string(p) +
                            " is not +-1 modulo N = " + std::to_string(N));
  }
}

}  // namespace

QSeries cusp_expansion_fp(const Subject& f, const Mat2& alpha, long p,
                          long prec, bool allow_any_residue) {
  check_residue_hypothesis(f.level(), p, allow_any_residue);
  const CuspBranch cb = decompose_fp_cusp(alpha, p);
  QSeries inner = inner_expansion(f, cb.gamma, prec);
  return cb.branch == 1 ? inner.substitute_up(p)
                        : inner.twist_shift(cb.k, p);
}

QSeries cusp_expansion_galois_operand(const Subject& f, const Mat2& alpha,
                                      long p, long prec) {
  require_unimodular(alpha);
  if (f.level() > 1 && std::gcd(p, f.level()) != 1)
    throw DomainError("p divides the level");
  switch (f.kind()) {
    case Subject::Kind::J:
      return j_expansion(prec);  // rational coefficients: the action is trivial
    case Subject::Kind::Fricke: {
      const FrickeIndex w = galois_operand_index(f.index(), alpha, p);
      return scaled_for(f, fricke_expansion(w, prec).galois_on_coeffs(p));
    }
    case Subject::Kind::Eta: {
      return inner_expansion(f, alpha, prec);  // rational coefficients
    }
  }
  throw Error("unreachable");
}

}  // namespace modfun
