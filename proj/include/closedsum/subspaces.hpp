#pragma once

#include <closedsum/numerics.hpp>

#include <string>
#include <utility>
#include <vector>

namespace closedsum {

/// A subspace of C^d stored as an orthonormal basis (d x r). r = 0 is allowed.
class Subspace {
 public:
  Subspace() : ambient_dim_(0), basis_(0, 0) {}

  /// Trusts that the columns are orthonormal; use from_spanning otherwise.
  static Subspace from_orthonormal(CMatrix basis) {
    Subspace s;
    s.ambient_dim_ = basis.rows();
    s.basis_ = std::move(basis);
    return s;
  }

  static Subspace zero(Index d) { return from_orthonormal(CMatrix(d, 0)); }
  static Subspace full(Index d) { return from_orthonormal(identity(d)); }

  Index ambient_dim() const { return ambient_dim_; }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return basis_.cols() == 0; }
  const CMatrix& basis() const { return basis_; }

  CMatrix projector() const { return basis_ * basis_.adjoint(); }

 private:
  Index ambient_dim_;
  CMatrix basis_;
};

/// Column space of `vectors`, orthonormalized at numerical rank.
inline Subspace from_spanning(const CMatrix& vectors, const Tolerances& tol = {}, double scale = 0.0) {
  return Subspace::from_orthonormal(column_space(vectors, tol, scale));
}

/// Same as above but insists that the vectors live in C^d.
inline Subspace from_spanning(Index d, const CMatrix& vectors, const Tolerances& tol = {}) {
  if (vectors.rows() != d) {
    throw Error(ErrorKind::DimensionMismatch,
                "vectors have " + std::to_string(vectors.rows()) + " rows, expected " + std::to_string(d));
  }
  return from_spanning(vectors, tol);
}

inline void require_same_ambient(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "subspaces live in C^" + std::to_string(a.ambient_dim()) + " and C^" +
                                                  std::to_string(b.ambient_dim()));
  }
}

inline Subspace complement(const Subspace& s, const Tolerances& tol = {}) {
  if (s.is_zero()) return Subspace::full(s.ambient_dim());
  const SvdResult f = svd(s.basis().adjoint(), tol);
  return Subspace::from_orthonormal(f.v.rightCols(s.ambient_dim() - f.rank));
}

inline Subspace sum_span(const std::vector<Subspace>& parts, Index ambient_dim, const Tolerances& tol = {}) {
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.ambient_dim() != ambient_dim) throw Error(ErrorKind::DimensionMismatch, "sum_span over mixed dimensions");
    cols += p.dim();
  }
  CMatrix all(ambient_dim, cols);
  Index at = 0;
  for (const auto& p : parts) {
    all.middleCols(at, p.dim()) = p.basis();
    at += p.dim();
  }
  return from_spanning(all, tol);
}

inline Subspace sum_span(const Subspace& a, const Subspace& b, const Tolerances& tol = {}) {
  require_same_ambient(a, b);
  return sum_span(std::vector<Subspace>{a, b}, a.ambient_dim(), tol);
}

/// A ∩ B as the top eigenspace of P_A + P_B (eigenvalue 2). The dimension is
/// taken from the rank of the concatenated bases so that the dimension law
/// dim(A∩B) + dim(A+B) = dim A + dim B holds exactly after rank decisions.
inline Subspace intersect(const Subspace& a, const Subspace& b, const Tolerances& tol = {}) {
  require_same_ambient(a, b);
  const Index d = a.ambient_dim();
  if (a.is_zero() || b.is_zero()) return Subspace::zero(d);
  CMatrix cat(d, a.dim() + b.dim());
  cat << a.basis(), b.basis();
  const Index k = a.dim() + b.dim() - svd(cat, tol).rank;
  if (k <= 0) return Subspace::zero(d);
  const HermitianSpectrum spec = eig_hermitian(a.projector() + b.projector(), tol);
  return Subspace::from_orthonormal(spec.eigenvectors.rightCols(k));
}

/// True when B ⊆ A, i.e. ‖(I − P_A) B_basis‖ ≤ margin_tol.
inline bool contains(const Subspace& a, const Subspace& b, const Tolerances& tol = {}) {
  require_same_ambient(a, b);
  if (b.is_zero()) return true;
  return op_norm(b.basis() - a.basis() * (a.basis().adjoint() * b.basis())) <= tol.margin_tol;
}

/// Ascending principal angles in [0, π/2]; min(dim A, dim B) of them.
inline std::vector<double> principal_angles(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  std::vector<double> out;
  if (a.is_zero() || b.is_zero()) return out;
  const RVector cosines = singular_values(a.basis().adjoint() * b.basis());
  for (Index i = 0; i < cosines.size(); ++i) out.push_back(std::acos(std::clamp(cosines(i), 0.0, 1.0)));
  return out;
}

inline double projector_distance(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  return op_norm(a.projector() - b.projector());
}

/// A ⊖ B: the orthogonal complement of B inside A (B need not be contained in A;
/// only the part of A orthogonal to B is kept).
inline Subspace orthogonal_difference(const Subspace& a, const Subspace& b, const Tolerances& tol = {}) {
  require_same_ambient(a, b);
  if (a.is_zero() || b.is_zero()) return a;
  const CMatrix rest = a.basis() - b.basis() * (b.basis().adjoint() * a.basis());
  return from_spanning(rest, tol, 1.0);
}

/// Coordinates of `s` in an orthonormal frame `frame` (d x m) whose span contains s.
inline Subspace restrict_to(const Subspace& s, const CMatrix& frame, const Tolerances& tol = {}) {
  return from_spanning(frame.adjoint() * s.basis(), tol);
}

/// Inverse of restrict_to: embed frame coordinates back into the ambient space.
inline Subspace embed_from(const Subspace& s, const CMatrix& frame) {
  return Subspace::from_orthonormal(frame * s.basis());
}

/// Ordered, nonempty tuple of subspaces of one ambient space.
class SubspaceSystem {
 public:
  SubspaceSystem(Index ambient_dim, std::vector<Subspace> members)
      : ambient_dim_(ambient_dim), members_(std::move(members)) {
    if (members_.empty()) throw Error(ErrorKind::InvalidArgument, "a subspace system needs at least one member");
    for (const auto& m : members_) {
      if (m.ambient_dim() != ambient_dim_) {
        throw Error(ErrorKind::DimensionMismatch, "system member does not live in C^" + std::to_string(ambient_dim_));
      }
    }
  }

  explicit SubspaceSystem(std::vector<Subspace> members)
      : SubspaceSystem(members.empty() ? 0 : members.front().ambient_dim(), std::move(members)) {}

  Index ambient_dim() const { return ambient_dim_; }
  Index size() const { return static_cast<Index>(members_.size()); }
  const Subspace& operator[](Index k) const { return members_.at(static_cast<std::size_t>(k)); }
  const std::vector<Subspace>& members() const { return members_; }

  Index total_rank() const {
    Index r = 0;
    for (const auto& m : members_) r += m.dim();
    return r;
  }

  /// Offsets of each member's block inside the concatenation [B_1 … B_n].
  std::vector<Index> offsets() const {
    std::vector<Index> out;
    Index at = 0;
    for (const auto& m : members_) {
      out.push_back(at);
      at += m.dim();
    }
    return out;
  }

  CMatrix concatenated_basis() const {
    CMatrix b(ambient_dim_, total_rank());
    Index at = 0;
    for (const auto& m : members_) {
      b.middleCols(at, m.dim()) = m.basis();
      at += m.dim();
    }
    return b;
  }

  CMatrix sum_of_projectors() const {
    CMatrix s = CMatrix::Zero(ambient_dim_, ambient_dim_);
    for (const auto& m : members_) s += m.projector();
    return s;
  }

  std::vector<CMatrix> projectors() const {
    std::vector<CMatrix> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.projector());
    return out;
  }

  SubspaceSystem subsystem(const std::vector<Index>& indices) const {
    std::vector<Subspace> picked;
    for (Index i : indices) {
      if (i < 0 || i >= size()) throw Error(ErrorKind::IndexOutOfRange, "member index " + std::to_string(i));
      picked.push_back(members_[static_cast<std::size_t>(i)]);
    }
    return SubspaceSystem(ambient_dim_, std::move(picked));
  }

 private:
  Index ambient_dim_;
  std::vector<Subspace> members_;
};

inline Subspace sum_span(const SubspaceSystem& s, const Tolerances& tol = {}) {
  return from_spanning(s.concatenated_basis(), tol);
}

}  // namespace closedsum
