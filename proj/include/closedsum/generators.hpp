#pragma once

// Seeded random and closed-form test systems.

#include <closedsum/subspaces.hpp>

#include <random>
#include <vector>

namespace closedsum {

using Rng = std::mt19937_64;

inline CMatrix random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

inline CMatrix random_real_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = cplx(g(rng), 0.0);
  return m;
}

/// Haar-like random r-dimensional subspace of C^d.
inline Subspace random_subspace(Index d, Index r, Rng& rng) {
  if (r == 0) return Subspace::zero(d);
  Eigen::HouseholderQR<CMatrix> qr(random_gaussian(d, r, rng));
  return Subspace::from_orthonormal(qr.householderQ() * CMatrix::Identity(d, r));
}

inline SubspaceSystem random_system(Index d, const std::vector<Index>& ranks, Rng& rng) {
  std::vector<Subspace> members;
  for (Index r : ranks) members.push_back(random_subspace(d, r, rng));
  return SubspaceSystem(d, std::move(members));
}

/// Random positive semidefinite matrix of the given rank, scaled to norm ≤ scale.
inline CMatrix random_psd(Index d, Index rank, double scale, Rng& rng) {
  const CMatrix g = random_gaussian(d, rank, rng);
  CMatrix m = g * g.adjoint();
  const double n = op_norm(m);
  if (n > 0) m *= scale / n;
  return m;
}

inline Subspace line(const CVector& v) {
  return Subspace::from_orthonormal(CMatrix(v.normalized()));
}

inline Subspace coordinate_line(Index d, Index i) {
  CVector v = CVector::Zero(d);
  v(i) = 1.0;
  return line(v);
}

/// n equiangular lines in C^{n-1}: the images of e_k − (1/n)·1 in the hyperplane Σx = 0,
/// written in an orthonormal basis of that hyperplane. Their projectors sum to n/(n−1)·I.
inline SubspaceSystem simplex_lines(Index n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "simplex lines need n >= 2");
  CMatrix vs(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i) vs(i, k) = (i == k ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
  // Orthonormal basis of the hyperplane orthogonal to (1,…,1).
  CVector ones = CVector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  const CMatrix frame = null_space(ones.adjoint());
  std::vector<Subspace> members;
  for (Index k = 0; k < n; ++k) members.push_back(line(frame.adjoint() * vs.col(k)));
  return SubspaceSystem(n - 1, std::move(members));
}

/// Two lines in C^2 at angle theta: span(e1) and span(cos θ e1 + sin θ e2).
inline std::pair<Subspace, Subspace> lines_at_angle(double theta) {
  CVector a(2), b(2);
  a << 1.0, 0.0;
  b << std::cos(theta), std::sin(theta);
  return {line(a), line(b)};
}

}  // namespace closedsum
