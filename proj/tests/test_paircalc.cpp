#include "oracles.hpp"
#include "random_cases.hpp"

#include <closedsum/paircalc.hpp>

#include <gtest/gtest.h>

using namespace closedsum;

namespace {

FunctionQuadruple polys(const std::vector<cplx>& a, const std::vector<cplx>& b, const std::vector<cplx>& c,
                        const std::vector<cplx>& d) {
  return {ScalarFunction::polynomial(a), ScalarFunction::polynomial(b), ScalarFunction::polynomial(c),
          ScalarFunction::polynomial(d)};
}

/// b straight from the defining expression, matrix polynomials by Horner.
CMatrix b_by_horner(const CMatrix& p1, const CMatrix& p2, const std::vector<std::vector<cplx>>& c) {
  const CMatrix x1 = p1 * p2 * p1, x2 = p2 * p1 * p2;
  return p1 * oracle::horner(c[0], x1) + p2 * oracle::horner(c[1], x2) + p1 * p2 * oracle::horner(c[2], x2) +
         p2 * p1 * oracle::horner(c[3], x1);
}

}  // namespace

TEST(PairCalculus, BuildBMatchesDefiningExpression) {
  Rng rng(21);
  for (const auto& [h1, h2] : cases::pair_batch(40, 321, 8)) {
    const std::vector<std::vector<cplx>> c{cases::random_poly(rng), cases::random_poly(rng), cases::random_poly(rng),
                                           cases::random_poly(rng)};
    const PairDecomposition dec = halmos_decompose(h1, h2);
    const CMatrix expected = b_by_horner(h1.projector(), h2.projector(), c);
    EXPECT_LE(op_norm(build_b(dec, polys(c[0], c[1], c[2], c[3])) - expected), 1e-9);
  }
}

TEST(PairCalculus, SumOfProjectorsOnFortyFiveDegreeLines) {
  const auto [h1, h2] = lines_at_angle(std::acos(-1.0) / 4.0);
  const PairDecomposition dec = halmos_decompose(h1, h2);
  const auto spec = spectrum_of_b(dec, polys({1.0}, {1.0}, {0.0}, {0.0}));
  const std::vector<cplx> expected{1.0 + 1.0 / std::sqrt(2.0), 1.0 - 1.0 / std::sqrt(2.0)};
  EXPECT_LE(oracle::brute_multiset_distance(spec, expected), 1e-12);
}

TEST(PairCalculus, SpectrumMatchesDenseEigenvalues) {
  Rng rng(22);
  for (const auto& [h1, h2] : cases::pair_batch(30, 4321, 6)) {
    const PairDecomposition dec = halmos_decompose(h1, h2);
    const FunctionQuadruple f = polys(cases::random_poly(rng), cases::random_poly(rng), cases::random_poly(rng),
                                      cases::random_poly(rng));
    const auto dense = oracle::dense_eigenvalues(build_b(dec, f));
    EXPECT_LE(oracle::brute_multiset_distance(spectrum_of_b(dec, f), dense), 1e-7);
  }
}

TEST(PairCalculus, MultisetDistanceAgreesWithBruteForce) {
  Rng rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<cplx> a, b;
    for (int i = 0; i < 5; ++i) {
      a.emplace_back(g(rng), g(rng));
      b.push_back(a.back() + cplx(1e-4 * g(rng), 1e-4 * g(rng)));
    }
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_NEAR(multiset_distance(a, b), oracle::brute_multiset_distance(a, b), 1e-15);
  }
  EXPECT_EQ(multiset_distance({1.0}, {}), kInfinity);
}

TEST(PairCalculus, ConstantTraceIsDetected) {
  // T = f1 + f2 + x(f3 + f4) = 2 for f1 = 1 + x, f2 = 1 − 2x, f3 = f4 = 1/2.
  const FunctionQuadruple f = polys({1.0, 1.0}, {1.0, -2.0}, {0.5}, {0.5});
  const CalculusProfile p = calculus_profile(f);
  ASSERT_TRUE(p.c.has_value());
  EXPECT_NEAR(std::abs(*p.c - cplx(2.0, 0.0)), 0.0, 1e-14);
  EXPECT_FALSE(calculus_profile(polys({0.0, 1.0}, {1.0}, {0.0}, {0.0})).c.has_value());
}

TEST(PairCalculus, ConstantFunctionsGiveSymmetricSpectrum) {
  // f1 = τ1, f2 = τ2 (and f3 = f4 = 0): generic eigenvalues pair up around (τ1 + τ2)/2.
  const cplx t1(2.0, 0.0), t2(-0.5, 1.0);
  for (const auto& [h1, h2] : cases::pair_batch(20, 5)) {
    const PairDecomposition dec = halmos_decompose(h1, h2);
    const auto spec = spectrum_of_b(dec, polys({t1}, {t2}, {0.0}, {0.0}));
    std::vector<cplx> rest;
    for (const cplx& l : spec) {
      bool special = false;
      for (const cplx z : {cplx(0.0, 0.0), t1, t2, t1 + t2}) special = special || std::abs(l - z) <= 1e-9;
      if (!special) rest.push_back(l);
    }
    std::vector<cplx> mirrored;
    for (const cplx& l : rest) mirrored.push_back(t1 + t2 - l);
    EXPECT_LE(multiset_distance(rest, mirrored), 1e-10);
  }
}

TEST(PairCalculus, CriteriaForInvertibleB) {
  const auto [h1, h2] = lines_at_angle(0.4);
  const PairDecomposition dec = halmos_decompose(h1, h2);
  const MarginReport r = calculus_criteria(dec, polys({1.0}, {1.0}, {0.0}, {0.0}));
  EXPECT_EQ(r.at("invertibility").verdict, Verdict::Satisfied);
  EXPECT_EQ(r.at("closed_range").verdict, Verdict::Satisfied);
  EXPECT_TRUE(r.flag("sum_at_one_nonzero"));
  EXPECT_TRUE(r.flag("trace_constant"));
  // σ(P1 + P2) = 1 ± cos 0.4.
  EXPECT_NEAR(r.margin("invertibility"), 1.0 - std::cos(0.4), 1e-12);
}

TEST(PairCalculus, VanishingFRejected) {
  const auto [h1, h2] = lines_at_angle(0.4);
  const PairDecomposition dec = halmos_decompose(h1, h2);
  try {
    calculus_criteria(dec, polys({0.0}, {1.0}, {0.0}, {0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
  }
}
