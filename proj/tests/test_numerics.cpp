#include "oracles.hpp"

#include <closedsum/generators.hpp>
#include <closedsum/numerics.hpp>

#include <gtest/gtest.h>

using namespace closedsum;

namespace {

CMatrix diag(std::initializer_list<double> xs) {
  RVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v.cast<cplx>().asDiagonal();
}

}  // namespace

TEST(Numerics, EigHermitianReconstructs) {
  Rng rng(1);
  const CMatrix h = hermitian_part(random_gaussian(6, 6, rng));
  const HermitianSpectrum s = eig_hermitian(h);
  const CMatrix back = s.eigenvectors * s.eigenvalues.cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();
  EXPECT_LE(op_norm(back - h), 1e-12);
  for (Index i = 1; i < s.eigenvalues.size(); ++i) EXPECT_LE(s.eigenvalues(i - 1), s.eigenvalues(i));
}

TEST(Numerics, EigHermitianRejectsBadInput) {
  Rng rng(2);
  try {
    eig_hermitian(CMatrix::Zero(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonSquare);
  }
  try {
    eig_hermitian(random_gaussian(3, 3, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(Numerics, SvdRankIsRelativeByDefault) {
  const CMatrix m = diag({1.0, 1e-3, 1e-12});
  EXPECT_EQ(svd(m).rank, 2);
  // A uniformly tiny matrix keeps its relative rank ...
  EXPECT_EQ(svd(1e-14 * identity(3)).rank, 3);
  // ... unless a reference scale says it is round-off.
  EXPECT_EQ(svd(1e-14 * identity(3), {}, 1.0).rank, 0);
  EXPECT_EQ(svd(CMatrix::Zero(3, 3)).rank, 0);
}

TEST(Numerics, NullAndColumnSpacesAreComplementary) {
  Rng rng(3);
  const CMatrix m = random_gaussian(5, 2, rng) * random_gaussian(2, 4, rng);
  const CMatrix n = null_space(m);
  const CMatrix c = column_space(m);
  EXPECT_EQ(n.cols(), 2);
  EXPECT_EQ(c.cols(), 2);
  EXPECT_LE(op_norm(m * n), 1e-12);
  EXPECT_LE(op_norm(c.adjoint() * c - identity(2)), 1e-12);
  EXPECT_LE(op_norm(m - c * (c.adjoint() * m)), 1e-12);
}

TEST(Numerics, PinvSatisfiesPenroseEquations) {
  Rng rng(4);
  const CMatrix m = random_gaussian(4, 2, rng) * random_gaussian(2, 3, rng);
  const CMatrix x = pinv(m);
  EXPECT_LE(op_norm(m * x * m - m), 1e-10);
  EXPECT_LE(op_norm(x * m * x - x), 1e-10);
  EXPECT_LE(asymmetry(m * x), 1e-10);
  EXPECT_LE(asymmetry(x * m), 1e-10);
}

TEST(Numerics, SmallestSingularValues) {
  const CMatrix m = diag({3.0, 0.5, 0.0});
  EXPECT_NEAR(smallest_nonzero_singular_value(m), 0.5, 1e-14);
  EXPECT_NEAR(smallest_singular_value(m), 0.0, 1e-14);
  EXPECT_EQ(smallest_nonzero_singular_value(CMatrix::Zero(2, 2)), kInfinity);
}

TEST(Numerics, SpectralProjectorPicksInterval) {
  const CMatrix m = diag({0.1, 0.5, 0.9});
  const CMatrix p = spectral_projector(m, {0.0, 0.7});
  EXPECT_LE(op_norm(p - diag({1.0, 1.0, 0.0})), 1e-12);
  EXPECT_LE(projector_defect(p), 1e-12);
}

TEST(Numerics, SpectralProjectorRefusesBoundaryEigenvalue) {
  try {
    spectral_projector(diag({0.25, 0.5}), {0.0, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EigenvalueOnBoundary);
  }
}

TEST(Numerics, MatrixFunctionsAgreeWithHorner) {
  Rng rng(5);
  const CMatrix h = random_psd(4, 4, 1.0, rng);
  const std::vector<cplx> c{{1.0, 0.5}, {-2.0, 0.0}, {0.25, -1.0}};
  const CMatrix via_eig = apply_hermitian(h, [&](double x) { return c[0] + c[1] * x + c[2] * x * x; });
  EXPECT_LE(op_norm(via_eig - oracle::horner(c, h)), 1e-10);
}

TEST(Numerics, SquareRootAndInversePowers) {
  Rng rng(6);
  const CMatrix a = random_psd(4, 4, 1.0, rng) + 0.5 * identity(4);
  const CMatrix r = sqrt_psd(a);
  EXPECT_LE(op_norm(r * r - a), 1e-10);
  const CMatrix m = inverse_power_pd(a, 1.5);
  EXPECT_LE(op_norm(m * a * r - identity(4)), 1e-9);
}

TEST(Numerics, ToleranceValidation) {
  Tolerances t;
  EXPECT_NO_THROW(t.validate(100));
  t.rank_tol = 0.0;
  EXPECT_THROW(t.validate(), Error);
  t.rank_tol = 1e-18;
  EXPECT_THROW(t.validate(10), Error);
}
