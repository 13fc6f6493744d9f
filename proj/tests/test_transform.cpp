#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "modfun/transform.hpp"

using namespace modfun;

namespace {

long positive_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

Mat2 random_sl2(std::mt19937_64& rng, long M) {
  for (;;) {
    long a = static_cast<long>(rng() % M), b = static_cast<long>(rng() % M);
    long c = static_cast<long>(rng() % M), d = static_cast<long>(rng() % M);
    if (positive_mod(a * d - b * c, M) == 1) return sl2_lift(a, b, c, d, M);
  }
}

}  // namespace

TEST_CASE("fricke index action") {
  FrickeIndex v(2, 0, 1);
  Mat2 S{0, -1, 1, 0};
  CHECK(fricke_sl2_action(v, S) == FrickeIndex(2, 1, 0));

  FrickeIndex w(3, 1, 0);
  Mat2 T{1, 1, 0, 1};
  CHECK(fricke_sl2_action(w, T) == FrickeIndex(3, 1, 1));

  CHECK(fricke_sl2_action(v, mat2_identity()) == v);

  CHECK_THROWS_AS(fricke_sl2_action(v, Mat2{2, 0, 0, 1}), DomainError);

  // group action law on random pairs
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    long N = 2 + static_cast<long>(rng() % 6);
    FrickeIndex u(N, static_cast<long>(rng() % N),
                  1 + static_cast<long>(rng() % (N - 1)));
    Mat2 alpha = random_sl2(rng, N);
    Mat2 beta = random_sl2(rng, N);
    CHECK(fricke_sl2_action(fricke_sl2_action(u, alpha), beta) ==
          fricke_sl2_action(u, alpha * beta));
  }
}

TEST_CASE("sl2 lifting and coset enumeration") {
  CHECK(coset_representatives(1).size() == 1);
  CHECK(coset_representatives(2).size() == 6);
  CHECK(coset_representatives(3).size() == 24);
  CHECK(sl2_order(12) == 1152);
  CHECK(sl2_order(55) == 55 * 55 * 55 / (5 * 5) * (5 * 5 - 1) / (11 * 11) *
                             (11 * 11 - 1));

  // brute-force count oracle
  for (long M : {2, 3, 4, 5, 6}) {
    long count = 0;
    for (long a = 0; a < M; ++a)
      for (long b = 0; b < M; ++b)
        for (long c = 0; c < M; ++c)
          for (long d = 0; d < M; ++d)
            if (positive_mod(a * d - b * c, M) == 1) ++count;
    CHECK(count == sl2_order(M));
  }

  for (long M : {2, 3, 4, 6, 12}) {
    auto reps = coset_representatives(M);
    CHECK(static_cast<long>(reps.size()) == sl2_order(M));
    CHECK(reps.front() == mat2_identity());
    // every rep is unimodular; residues are pairwise distinct
    std::set<std::array<long, 4>> seen;
    for (const auto& m : reps) {
      CHECK(m.det() == 1);
      seen.insert({positive_mod(m.a, M), positive_mod(m.b, M),
                   positive_mod(m.c, M), positive_mod(m.d, M)});
    }
    CHECK(seen.size() == reps.size());
  }

  // lift matches its residues
  std::mt19937_64 rng(3);
  for (int it = 0; it < 100; ++it) {
    long M = 2 + static_cast<long>(rng() % 54);
    Mat2 m = random_sl2(rng, M);
    CHECK(m.det() == 1);
  }
}

TEST_CASE("cusp decomposition") {
  // alpha = I, p arbitrary: branch 2 with k = 0 and gamma = I
  CuspBranch cb = decompose_fp_cusp(mat2_identity(), 3);
  CHECK(cb.branch == 2);
  CHECK(cb.k == 0);
  CHECK(cb.gamma == mat2_identity());

  // alpha = S, p = 2: branch 1 with gamma = S
  Mat2 S{0, -1, 1, 0};
  cb = decompose_fp_cusp(S, 2);
  CHECK(cb.branch == 1);
  CHECK(cb.gamma == S);

  // determinants forced to one on random input
  std::mt19937_64 rng(17);
  for (int it = 0; it < 300; ++it) {
    long p = std::vector<long>{2, 3, 5, 11}[rng() % 4];
    Mat2 alpha = random_sl2(rng, 2 + static_cast<long>(rng() % 30));
    CuspBranch c2 = decompose_fp_cusp(alpha, p);
    CHECK(c2.gamma.det() == 1);
    CHECK((c2.branch == 1) == (alpha.a % p == 0));
    if (c2.branch == 2) {
      CHECK(c2.k >= 0);
      CHECK(c2.k < p);
      CHECK((alpha.a * c2.k - alpha.b) % p == 0);
    }
  }
}

TEST_CASE("cusp expansion of the rescaled function") {
  Subject j = Subject::j();
  // identity cusp: plain rescaling
  QSeries direct = j_expansion(10).rescale_to_subtau(3);
  CHECK(cusp_expansion_fp(j, mat2_identity(), 3, 10) == direct);

  // S cusp with p = 2: branch 1, key substitution
  Mat2 S{0, -1, 1, 0};
  CHECK(cusp_expansion_fp(j, S, 2, 10) == j_expansion(10).substitute_up(2));

  // residue hypothesis guard
  Subject f5 = Subject::fricke(FrickeIndex(5, 0, 1));
  CHECK_THROWS_AS(cusp_expansion_fp(f5, mat2_identity(), 3, 10), HypothesisError);
  CHECK_NOTHROW(cusp_expansion_fp(f5, mat2_identity(), 3, 10, true));
  CHECK_THROWS_AS(cusp_expansion_fp(f5, mat2_identity(), 5, 10), DomainError);

  // coefficient fields: f_p over alpha lives in Q(zeta_Np), f over alpha in
  // Q(zeta_N)
  Subject f4 = Subject::fricke(FrickeIndex(4, 0, 1));
  std::mt19937_64 rng(23);
  for (int it = 0; it < 10; ++it) {
    Mat2 alpha = random_sl2(rng, 12);
    QSeries fp = cusp_expansion_fp(f4, alpha, 3, 17);
    CHECK(12 % fp.coeff_level() == 0);
    QSeries fa = fricke_expansion(fricke_sl2_action(FrickeIndex(4, 0, 1), alpha), 17);
    CHECK(4 % fa.coeff_level() == 0);
  }
}

TEST_CASE("invariance under principal congruence perturbation") {
  // f_p over delta*alpha equals f_p over alpha for delta in the principal
  // congruence group of level Np
  std::mt19937_64 rng(29);
  for (long N : {1L, 2L, 3L, 4L}) {
    const long p = (N == 4 || N == 2) ? 3 : 2;
    const long Np = N * p;
    Subject f = N == 1 ? Subject::j() : Subject::fricke(FrickeIndex(N, 1, 0));
    if (positive_mod(p, N) != 1 && positive_mod(p, N) != positive_mod(-1, N) && N > 1)
      continue;
    Mat2 U{1, Np, 0, 1};
    Mat2 L{1, 0, Np, 1};
    for (int it = 0; it < 6; ++it) {
      Mat2 alpha = random_sl2(rng, 24);
      QSeries base = cusp_expansion_fp(f, alpha, p, 3 * N + 5);
      CHECK(cusp_expansion_fp(f, U * alpha, p, 3 * N + 5) == base);
      CHECK(cusp_expansion_fp(f, L * alpha, p, 3 * N + 5) == base);
      CHECK(cusp_expansion_fp(f, (U * L) * alpha, p, 3 * N + 5) == base);
    }
  }
}

TEST_CASE("galois operand") {
  // the coefficient action realizes the diagonal label move:
  // galois_on_coeffs(expansion(u), d) = expansion(u * diag(1, d))
  std::mt19937_64 rng(31);
  for (int it = 0; it < 20; ++it) {
    long N = 2 + static_cast<long>(rng() % 4);
    long d = 1 + static_cast<long>(rng() % (N - 1));
    while (std::gcd(d, N) != 1) d = 1 + static_cast<long>(rng() % (N - 1));
    FrickeIndex u(N, static_cast<long>(rng() % N),
                  1 + static_cast<long>(rng() % (N - 1)));
    FrickeIndex ud(N, u.a, u.b * d);
    CHECK(fricke_expansion(u, 2 * N + 3).galois_on_coeffs(d) ==
          fricke_expansion(ud, 2 * N + 3));
  }

  // rational coefficients are untouched
  Subject j = Subject::j();
  Mat2 S{0, -1, 1, 0};
  CHECK(cusp_expansion_galois_operand(j, S, 5, 8) == j_expansion(8));

  // p = 1 mod N: the operand is the label acted by alpha only
  Subject f5 = Subject::fricke(FrickeIndex(5, 0, 1));
  Mat2 T{1, 1, 0, 1};
  QSeries lhs = cusp_expansion_galois_operand(f5, T, 11, 12);
  QSeries rhs = fricke_expansion(fricke_sl2_action(FrickeIndex(5, 0, 1), T), 12);
  CHECK(lhs == rhs);

  // p = -1 mod N: applying the operand construction twice returns home
  FrickeIndex v(4, 1, 0);
  Mat2 alpha = random_sl2(rng, 4);
  FrickeIndex w = galois_operand_index(v, alpha, 3);
  // conjugation is an involution here since 3^2 = 1 mod 4
  FrickeIndex w2 = galois_operand_index(w, mat2_identity(), 3);
  CHECK(fricke_sl2_action(w2, mat2_identity()) ==
        galois_operand_index(galois_operand_index(v, alpha, 3), mat2_identity(), 3));
}
