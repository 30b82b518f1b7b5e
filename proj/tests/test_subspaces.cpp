#include "oracles.hpp"

#include <closedsum/generators.hpp>
#include <closedsum/subspaces.hpp>

#include <gtest/gtest.h>

using namespace closedsum;

TEST(Subspaces, FromSpanningOrthonormalizes) {
  Rng rng(10);
  const CMatrix v = random_gaussian(5, 2, rng);
  CMatrix redundant(5, 3);
  redundant << v, v.col(0) + 2.0 * v.col(1);
  const Subspace s = from_spanning(redundant);
  EXPECT_EQ(s.dim(), 2);
  EXPECT_LE(op_norm(s.projector() - oracle::projector_of(v)), 1e-12);
}

TEST(Subspaces, FromSpanningChecksDimension) {
  try {
    from_spanning(3, CMatrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Subspaces, ComplementIsOrthogonalAndFills) {
  Rng rng(11);
  const Subspace s = random_subspace(6, 2, rng);
  const Subspace c = complement(s);
  EXPECT_EQ(c.dim(), 4);
  EXPECT_LE(op_norm(s.basis().adjoint() * c.basis()), 1e-12);
  EXPECT_LE(op_norm(s.projector() + c.projector() - identity(6)), 1e-12);
  EXPECT_EQ(complement(Subspace::zero(3)).dim(), 3);
}

TEST(Subspaces, DimensionLawForSumAndIntersection) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const Index d = 4 + t % 4;
    // Share a random block so that intersections are nontrivial.
    const CMatrix shared = random_gaussian(d, t % 3, rng);
    CMatrix a(d, shared.cols() + 1), b(d, shared.cols() + 2);
    a << shared, random_gaussian(d, 1, rng);
    b << shared, random_gaussian(d, 2, rng);
    const Subspace sa = from_spanning(a), sb = from_spanning(b);
    const Subspace meet = intersect(sa, sb), join = sum_span(sa, sb);
    EXPECT_EQ(meet.dim() + join.dim(), sa.dim() + sb.dim());
    EXPECT_TRUE(contains(sa, meet));
    EXPECT_TRUE(contains(sb, meet));
    EXPECT_TRUE(contains(join, sa));
    EXPECT_TRUE(contains(join, sb));
    if (shared.cols() > 0) {
      EXPECT_TRUE(contains(meet, from_spanning(shared)));
    }
  }
}

TEST(Subspaces, PrincipalAnglesOfCoordinatePlanes) {
  CVector u(3), v(3);
  u << 1, 0, 0;
  v << 0, 1, 0;
  CMatrix a(3, 2), b(3, 2);
  a << u, v;
  b << u, (v + CVector::Unit(3, 2)) / std::sqrt(2.0);
  const auto ang = principal_angles(from_spanning(a), from_spanning(b));
  ASSERT_EQ(ang.size(), 2u);
  EXPECT_NEAR(ang[0], 0.0, 1e-7);
  EXPECT_NEAR(ang[1], std::acos(-1.0) / 4.0, 1e-12);
}

TEST(Subspaces, OrthogonalDifferenceOfEqualSpacesIsZero) {
  Rng rng(13);
  const Subspace s = random_subspace(5, 3, rng);
  // Same space, different basis.
  const Subspace t = from_spanning(s.basis() * random_gaussian(3, 3, rng));
  EXPECT_EQ(orthogonal_difference(s, t).dim(), 0);
  EXPECT_EQ(orthogonal_difference(s, Subspace::zero(5)).dim(), 3);
}

TEST(Subspaces, RestrictAndEmbedRoundTrip) {
  Rng rng(14);
  const Subspace frame = random_subspace(6, 4, rng);
  const Subspace inside = from_spanning(frame.basis() * random_gaussian(4, 2, rng));
  const Subspace local = restrict_to(inside, frame.basis());
  EXPECT_EQ(local.ambient_dim(), 4);
  EXPECT_LE(projector_distance(embed_from(local, frame.basis()), inside), 1e-12);
}

TEST(Subspaces, SystemBookkeeping) {
  Rng rng(15);
  const SubspaceSystem s = random_system(5, {1, 2, 2}, rng);
  EXPECT_EQ(s.size(), 3);
  EXPECT_EQ(s.total_rank(), 5);
  EXPECT_EQ(s.offsets(), (std::vector<Index>{0, 1, 3}));
  EXPECT_EQ(s.concatenated_basis().cols(), 5);
  CMatrix sum = CMatrix::Zero(5, 5);
  for (const auto& p : s.projectors()) sum += p;
  EXPECT_LE(op_norm(sum - s.sum_of_projectors()), 1e-14);
  EXPECT_EQ(s.subsystem({2, 0}).size(), 2);
  EXPECT_THROW(s.subsystem({3}), Error);
  EXPECT_THROW(SubspaceSystem(5, {}), Error);
  EXPECT_THROW(SubspaceSystem(4, {Subspace::zero(5)}), Error);
}
