#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "modfun/kronecker.hpp"
#include "modfun/valuation.hpp"

using namespace modfun;

TEST_CASE("witness product for j at the identity cusp") {
  Subject j = Subject::j();
  for (long p : {2L, 3L}) {
    QSeries w = congruence_witness_cusp(j, mat2_identity(), p, 20);
    REQUIRE(w.has_terms());
    // leading exponent -(p^2+p-1)/p: the two top terms of the first factor
    // cancel, leaving the cross term; compare the exponents as fractions
    CHECK(*w.leading_key() * p == -(p * p + p - 1) * w.exp_denom());
    // every coefficient divisible by p, with integral coefficients
    CHECK(w.all_coeffs_integral());
    CHECK(w.all_coeffs_divisible_by(mpz_class(p)));
  }

  // p = 2 leading coefficient: 2*744 * (-1) from the cross terms
  QSeries w2 = congruence_witness_cusp(j, mat2_identity(), 2, 20);
  CHECK(w2.coeff(*w2.leading_key()) == CycNumber::integer(-1488));
}

TEST_CASE("homomorphy of the twist and substitution maps") {
  // the per-cusp engine relies on twist/substitute commuting with powers
  QSeries f = fricke_expansion(FrickeIndex(3, 1, 0), 14);
  CHECK(f.twist_shift(1, 2).pow(2) == f.pow(2).twist_shift(1, 2));
  CHECK(f.substitute_up(2).pow(3) == f.pow(3).substitute_up(2));
  QSeries g = j_expansion(9);
  CHECK(g.twist_shift(2, 3).pow(2) == g.pow(2).twist_shift(2, 3));
}

TEST_CASE("verify the congruence for j, small primes, all cosets") {
  Subject j = Subject::j();
  for (long p : {2L, 3L}) {
    CongruenceReport rep =
        verify_congruence(j, p, VerifyMode::AllCosets, 30);
    CHECK(rep.pass);
    CHECK(rep.per_cusp.size() == static_cast<size_t>(sl2_order(p)));
    CHECK(rep.case1_count > 0);
    CHECK(rep.case2_count > 0);
    CHECK(rep.min_margin.value() >= 1);
    CHECK(rep.certified_min >= 30);
  }
}

TEST_CASE("verify the congruence for torsion subjects at small level") {
  // N = 3, p = 2 = -1 mod 3: the conjugation-sensitive case
  Subject f3 = Subject::fricke(FrickeIndex(3, 1, 0));
  CongruenceReport rep = verify_congruence(f3, 2, VerifyMode::AllCosets, 20);
  CHECK(rep.pass);
  CHECK(rep.per_cusp.size() == static_cast<size_t>(sl2_order(6)));
  CHECK(rep.min_margin.value() >= 1);

  // N = 2, p = 3 = 1 mod 2
  Subject f2 = Subject::fricke(FrickeIndex(2, 0, 1));
  CongruenceReport rep2 = verify_congruence(f2, 3, VerifyMode::AllCosets, 20);
  CHECK(rep2.pass);
  CHECK(rep2.per_cusp.size() == static_cast<size_t>(sl2_order(6)));
}

TEST_CASE("the conjugated operand is required when p = -1 mod N") {
  // stitching the plainly-acted label into the product breaks the
  // congruence at some cusp: this pins the operand order
  Subject f3 = Subject::fricke(FrickeIndex(3, 1, 0));
  const long p = 2;
  bool some_cusp_fails_with_naive_operand = false;
  const long prec = 30;
  for (const Mat2& alpha : coset_representatives(6)) {
    QSeries A = cusp_expansion_fp(f3, alpha, p, prec);
    QSeries Ap = A.pow(p);
    // naive operand: act by alpha first, then the coefficient Galois map
    FrickeIndex naive = fricke_sl2_action(FrickeIndex(3, 1, 0), alpha);
    QSeries Bn = fricke_expansion(naive, prec).galois_on_coeffs(p);
    QSeries prod = (Ap - Bn) * (A - Bn.pow(p));
    if (!prod.all_coeffs_divisible_by(mpz_class(p))) {
      some_cusp_fails_with_naive_operand = true;
      break;
    }
  }
  CHECK(some_cusp_fails_with_naive_operand);
}

TEST_CASE("verdict is stable under principal congruence replacement") {
  Subject f2 = Subject::fricke(FrickeIndex(2, 0, 1));
  const long p = 3;
  std::mt19937_64 rng(606);
  for (int it = 0; it < 4; ++it) {
    long a = static_cast<long>(rng() % 6), b = static_cast<long>(rng() % 6);
    long c = static_cast<long>(rng() % 6), d = static_cast<long>(rng() % 6);
    if (((a * d - b * c) % 6 + 6) % 6 != 1) {
      --it;
      continue;
    }
    Mat2 alpha = sl2_lift(a, b, c, d, 6);
    Mat2 gamma{1, 6, 0, 1};  // an element of the level-6 principal group
    QSeries w1 = congruence_witness_cusp(f2, alpha, p, 15);
    QSeries w2 = congruence_witness_cusp(f2, gamma * alpha, p, 15);
    CHECK(w1 == w2);
  }
}

TEST_CASE("scaled witness equals the exponent-scaled identity-cusp witness") {
  for (auto [N, p] : std::vector<std::pair<long, long>>{{1, 2}, {2, 3}, {3, 2}}) {
    Subject f = N == 1 ? Subject::j() : Subject::fricke(FrickeIndex(N, 0, 1));
    QSeries g = congruence_witness_scaled(f, p, 15);
    QSeries w = congruence_witness_cusp(f, mat2_identity(), p, 15).substitute_up(p);
    CHECK(g.truncated(std::min(g.prec(), w.prec())) ==
          w.truncated(std::min(g.prec(), w.prec())));
    CHECK(g.all_coeffs_divisible_by(mpz_class(p)));
  }
}

TEST_CASE("sampled mode covers both branches and echoes the seed") {
  Subject f = Subject::fricke(FrickeIndex(5, 0, 1));
  CongruenceReport rep =
      verify_congruence(f, 11, VerifyMode::Sampled, 10, 424242, 8);
  CHECK(rep.pass);
  CHECK(rep.seed == 424242);
  CHECK(rep.per_cusp.size() == 9);  // identity + 8 samples
  CHECK(rep.case1_count >= 1);
  CHECK(rep.case2_count >= 1);
  // deterministic reruns
  CongruenceReport rep2 =
      verify_congruence(f, 11, VerifyMode::Sampled, 10, 424242, 8);
  CHECK(rep2.per_cusp.size() == rep.per_cusp.size());
  for (size_t i = 0; i < rep.per_cusp.size(); ++i)
    CHECK(rep.per_cusp[i].alpha == rep2.per_cusp[i].alpha);
}

TEST_CASE("hypothesis guards") {
  Subject f5 = Subject::fricke(FrickeIndex(5, 0, 1));
  CHECK_THROWS_AS(verify_congruence(f5, 3, VerifyMode::CuspInfinity, 10),
                  HypothesisError);
  // negative control runs and reports
  CongruenceReport rep = verify_congruence(f5, 3, VerifyMode::CuspInfinity, 10,
                                           1, 0, /*negative_control=*/true);
  CHECK(rep.pass);  // observational
  CHECK_FALSE(rep.hypothesis_ok);

  Subject eta = Subject::eta(EtaQuotientSpec({{2, 24}, {1, -24}}), 2);
  CHECK_THROWS_AS(verify_congruence(eta, 3, VerifyMode::AllCosets, 10), DomainError);
  CongruenceReport er = verify_congruence(eta, 3, VerifyMode::CuspInfinity, 10);
  CHECK(er.pass);

  CHECK_THROWS_AS(verify_congruence(f5, 5, VerifyMode::CuspInfinity, 10), DomainError);
}

TEST_CASE("modular polynomial construction and the classical congruence") {
  ModularPolynomial phi2 = modular_polynomial(2, 60);
  CHECK(phi2.is_monic_in_x());
  CHECK(phi2.is_symmetric());
  CHECK(phi2.degree() == 3);
  CHECK(phi2.coeff(2, 0) == -162000);
  CHECK(phi2.coeff(2, 2) == -1);
  CHECK(phi2.coeff(2, 1) == 1488);
  CHECK(phi2.coeff(1, 1) == 40773375);
  CHECK(phi2.coeff(1, 0) == 8748000000L);
  CHECK(phi2.coeff(0, 0) == mpz_class("-157464000000000"));
  CHECK(kronecker_classical_check(phi2));

  ModularPolynomial phi3 = modular_polynomial(3, 60);
  CHECK(phi3.is_monic_in_x());
  CHECK(phi3.is_symmetric());
  CHECK(phi3.degree() == 4);
  CHECK(kronecker_classical_check(phi3));

  CHECK_THROWS_AS(modular_polynomial(7, 60), DomainError);
  CHECK_THROWS_AS(modular_polynomial(5, 60), DomainError);

  // consistency with the certificate route, coefficient for coefficient
  QSeries j = j_expansion(40);
  IntegralityCertificate cert = integrality_certificate(
      "j(2tau)", {j.substitute_up(2), j.rescale_to_subtau(2), j.twist_shift(1, 2)});
  REQUIRE(cert.all_integral);
  for (long i = 0; i <= 3; ++i) {
    const JPolynomial& row = cert.char_poly[static_cast<size_t>(3 - i)];
    for (long k = 0; k <= 3; ++k) {
      mpz_class want = phi2.coeff(i, k);
      mpz_class got = 0;
      if (k <= row.degree() && 3 - i > 0)
        got = row.coeffs[static_cast<size_t>(k)].rational_value().get_num();
      if (i == 3)
        got = (k == 0) ? 1 : 0;  // monic leading row
      CHECK(got == want);
    }
  }

  // evaluation check: Phi_2(j(2tau), j(tau)) vanishes on the window
  QSeries j2 = j.substitute_up(2);
  QSeries acc;
  bool any = false;
  for (const auto& [ik, c] : phi2.coeffs) {
    if (c == 0) continue;
    QSeries term = (ik.first > 0 ? j2.pow(ik.first)
                                 : QSeries::from_terms(1, 1, 0, j.prec(),
                                                       {{0, CycNumber::integer(1)}}));
    if (ik.second > 0) term = term * j.pow(ik.second);
    term = term.scaled(CycNumber::integer(c));
    acc = any ? acc + term : term;
    any = true;
  }
  CHECK_FALSE(acc.has_terms());
  CHECK(acc.prec() >= 10);
}

TEST_CASE("report serialization") {
  Subject j = Subject::j();
  CongruenceReport rep = verify_congruence(j, 2, VerifyMode::AllCosets, 12);
  std::string text = rep.to_text();
  CHECK(text.find("PASS") != std::string::npos);
  std::string json = rep.to_json_string();
  CHECK(json.find("\"verdict\": \"pass\"") != std::string::npos);
  CHECK(json.find("\"per_cusp\"") != std::string::npos);

  ModularPolynomial phi2 = modular_polynomial(2, 60);
  auto tr = phi2.triples();
  CHECK(tr.size() == 10);  // nonzero entries of the degree-3 relation
  CHECK(std::get<2>(tr.front()) == mpz_class("-157464000000000"));
}
