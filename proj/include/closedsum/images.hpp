#pragma once

#include <closedsum/margins.hpp>
#include <closedsum/reduction.hpp>
#include <closedsum/subspaces.hpp>
#include <closedsum/systems.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace closedsum {

enum class OperatorKind { Nonnegative, General };

inline const char* to_string(OperatorKind k) { return k == OperatorKind::Nonnegative ? "nonnegative" : "general"; }

/// Square operators on C^d with a kind tag per member.
class OperatorFamily {
 public:
  OperatorFamily(Index ambient_dim, std::vector<CMatrix> members, std::vector<OperatorKind> kinds,
                 const Tolerances& tol = {})
      : ambient_dim_(ambient_dim), members_(std::move(members)), kinds_(std::move(kinds)) {
    if (kinds_.empty()) kinds_.assign(members_.size(), OperatorKind::General);
    if (kinds_.size() != members_.size()) throw Error(ErrorKind::DimensionMismatch, "one kind per member");
    for (std::size_t k = 0; k < members_.size(); ++k) {
      const CMatrix& m = members_[k];
      if (m.rows() != ambient_dim_ || m.cols() != ambient_dim_) {
        throw Error(ErrorKind::DimensionMismatch, "member " + std::to_string(k + 1) + " is not " +
                                                      std::to_string(ambient_dim_) + "x" + std::to_string(ambient_dim_));
      }
      if (kinds_[k] == OperatorKind::Nonnegative) {
        if (eigvals_hermitian(m, tol)(0) < -tol.eig_tol * std::max(1.0, op_norm(m))) {
          throw Error(ErrorKind::NotNonnegative, "member " + std::to_string(k + 1) + " has a negative eigenvalue");
        }
      }
    }
  }

  static OperatorFamily nonnegative(std::vector<CMatrix> members, const Tolerances& tol = {}) {
    const Index d = members.empty() ? 0 : members.front().rows();
    std::vector<OperatorKind> kinds(members.size(), OperatorKind::Nonnegative);
    return OperatorFamily(d, std::move(members), std::move(kinds), tol);
  }

  static OperatorFamily general(std::vector<CMatrix> members) {
    const Index d = members.empty() ? 0 : members.front().rows();
    std::vector<OperatorKind> kinds(members.size(), OperatorKind::General);
    return OperatorFamily(d, std::move(members), std::move(kinds));
  }

  Index ambient_dim() const { return ambient_dim_; }
  Index size() const { return static_cast<Index>(members_.size()); }
  const CMatrix& operator[](Index k) const { return members_.at(static_cast<std::size_t>(k)); }
  const std::vector<CMatrix>& members() const { return members_; }
  const std::vector<OperatorKind>& kinds() const { return kinds_; }

  bool all_nonnegative() const {
    for (auto k : kinds_)
      if (k != OperatorKind::Nonnegative) return false;
    return true;
  }

 private:
  Index ambient_dim_;
  std::vector<CMatrix> members_;
  std::vector<OperatorKind> kinds_;
};

struct DouglasFactor {
  CMatrix c;                    // A = B C
  double lambda = 0.0;          // smallest λ with AA* ≤ λ BB*
  double residual = 0.0;        // ‖A − BC‖
  double inclusion_defect = 0;  // ‖(I − P_{Im B}) A‖
};

/// Factor A = BC with C = B⁺A, which has ker C = ker A and Im C ⊆ (ker B)⊥.
inline DouglasFactor douglas_factor(const CMatrix& a, const CMatrix& b, const Tolerances& tol = {}) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "A and B must share their target space");
  const SvdResult f = svd(b, tol);
  const CMatrix ur = f.u.leftCols(f.rank);
  DouglasFactor out;
  out.inclusion_defect = op_norm(a - ur * (ur.adjoint() * a));
  if (out.inclusion_defect > tol.margin_tol) {
    throw Error(ErrorKind::RangeNotIncluded,
                "Im A leaves Im B by " + std::to_string(out.inclusion_defect));
  }
  out.c = pinv(b, tol) * a;
  out.residual = op_norm(a - b * out.c);
  if (f.rank > 0) {
    const RVector inv = f.singular_values.head(f.rank).cwiseInverse();
    const CMatrix scaled = inv.cast<cplx>().asDiagonal() * (ur.adjoint() * a);
    const double n = op_norm(scaled);
    out.lambda = n * n;
  }
  return out;
}

struct SumOfImages {
  Subspace image;
  MarginReport report;
};

/// ΣIm a_k = Im √(Σ a_k a_k*). For nonnegative families also reports "gap", the
/// smallest nonzero eigenvalue of Σa_k, and "full" (its smallest eigenvalue).
inline SumOfImages sum_of_images(const OperatorFamily& f, const Tolerances& tol = {}) {
  const Index d = f.ambient_dim();
  CMatrix gram = CMatrix::Zero(d, d);
  CMatrix cat(d, d * f.size());
  for (Index k = 0; k < f.size(); ++k) {
    gram += f[k] * f[k].adjoint();
    cat.middleCols(k * d, d) = f[k];
  }
  SumOfImages out;
  // The root is U Σ U* from the SVD of the concatenation. Taking square roots of the
  // eigenvalues of the Gram matrix would turn round-off of order ε into order √ε.
  const SvdResult s = svd(cat, tol);
  const Index m = s.singular_values.size();
  const CMatrix root = s.u.leftCols(m) * s.singular_values.cast<cplx>().asDiagonal() * s.u.leftCols(m).adjoint();
  out.report.values["root_residual"] = op_norm(root * root - gram) / std::max(1.0, op_norm(gram));
  out.image = from_spanning(root, tol);
  const Subspace direct = from_spanning(cat, tol);
  const double dist = projector_distance(out.image, direct);
  out.report.values["range_distance"] = dist;
  out.report.values["image_dim"] = static_cast<double>(out.image.dim());
  out.report.flags["range_agreement"] = dist <= 10.0 * tol.eig_tol;
  if (f.all_nonnegative() && f.size() > 0) {
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& m : f.members()) sum += m;
    const RVector ev = eigvals_hermitian(sum, tol);
    const Index kernel = d - direct.dim();
    out.report.add("gap", direct.dim() == 0 ? kInfinity : ev(kernel), tol);
    out.report.add("full", kernel == 0 ? ev(0) : 0.0, tol);
  }
  return out;
}

/// (2 + ω²n(n−1)) / (2 − ω).
inline double product_bound_constant(Index n, double omega) {
  const double nn = static_cast<double>(n);
  return (2.0 + omega * omega * nn * (nn - 1.0)) / (2.0 - omega);
}

namespace detail {

inline double family_omega(const OperatorFamily& f, const Tolerances& tol) {
  double omega = 0.0;
  for (Index k = 0; k < f.size(); ++k) {
    if (f.kinds()[static_cast<std::size_t>(k)] != OperatorKind::Nonnegative &&
        eigvals_hermitian(f[k], tol)(0) < -tol.eig_tol * std::max(1.0, op_norm(f[k]))) {
      throw Error(ErrorKind::NotNonnegative, "product bound needs nonnegative operators");
    }
    omega = std::max(omega, op_norm(f[k]));
  }
  if (omega >= 2.0) throw Error(ErrorKind::NormTooLarge, "some ‖T_k‖ reaches 2");
  return omega;
}

inline CMatrix descent_product(const OperatorFamily& f) {
  const Index d = f.ambient_dim();
  CMatrix e = identity(d);
  for (Index k = 0; k < f.size(); ++k) e = (identity(d) - f[k]) * e;  // (I − T_n)…(I − T_1)
  return e;
}

}  // namespace detail

/// Slack C(‖x‖² − ‖Ex‖²) − Σ(T_k x, x) with E = (I − T_n)…(I − T_1) and C the
/// product bound constant; nonnegative whenever all ‖T_k‖ ≤ ω < 2.
inline double product_bound(const OperatorFamily& f, const CVector& x, const Tolerances& tol = {}) {
  const double omega = detail::family_omega(f, tol);
  const double c = product_bound_constant(f.size(), omega);
  const CMatrix e = detail::descent_product(f);
  double rhs = 0.0;
  for (const auto& t : f.members()) rhs += x.dot(t * x).real();
  return c * (x.squaredNorm() - (e * x).squaredNorm()) - rhs;
}

/// Worst-case slack over unit x: λ_min(C(I − E*E) − ΣT_k).
inline double product_bound_worst(const OperatorFamily& f, const Tolerances& tol = {}) {
  const double omega = detail::family_omega(f, tol);
  const double c = product_bound_constant(f.size(), omega);
  const CMatrix e = detail::descent_product(f);
  const Index d = f.ambient_dim();
  CMatrix form = c * (identity(d) - e.adjoint() * e);
  for (const auto& t : f.members()) form -= t;
  return eigvals_hermitian(hermitian_part(form), tol)(0);
}

enum class PRadiusStatus { Certified, Deficient, Inconclusive };

inline const char* to_string(PRadiusStatus s) {
  switch (s) {
    case PRadiusStatus::Certified: return "certified";
    case PRadiusStatus::Deficient: return "deficient";
    case PRadiusStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct PRadiusResult {
  std::vector<double> a;      // a_{k,p}, k = 1..k_max
  std::vector<double> roots;  // a_{k,p}^{1/k}
  PRadiusStatus status = PRadiusStatus::Inconclusive;
  Index certified_depth = 0;  // first k with a root below 1 − margin_tol
  Index common_kernel_dim = 0;
};

/// Averaged p-norms of all length-k products of A_i = I − T_i.
/// Enumerates products depth-first; the total product count is capped by `budget`.
inline PRadiusResult p_radius(const OperatorFamily& f, double p, Index k_max, const Tolerances& tol = {},
                              double budget = 1e6) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be at least 1");
  if (k_max < 1) throw Error(ErrorKind::InvalidArgument, "depth must be at least 1");
  const Index n = f.size();
  const Index d = f.ambient_dim();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty operator family");
  double cost = 0.0, level = 1.0;
  for (Index k = 1; k <= k_max; ++k) {
    level *= static_cast<double>(n);
    cost += level;
  }
  if (cost > budget) {
    throw Error(ErrorKind::BudgetExceeded, std::to_string(static_cast<long long>(cost)) + " products exceed the budget");
  }

  std::vector<CMatrix> a;
  for (const auto& t : f.members()) a.push_back(identity(d) - t);

  std::vector<double> sums(static_cast<std::size_t>(k_max), 0.0);
  // Explicit stack of (product, depth) to avoid recursion.
  struct Frame {
    CMatrix prod;
    Index depth;
  };
  std::vector<Frame> stack;
  for (Index i = n - 1; i >= 0; --i) stack.push_back({a[static_cast<std::size_t>(i)], 1});
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    sums[static_cast<std::size_t>(fr.depth - 1)] += std::pow(op_norm(fr.prod), p);
    if (fr.depth < k_max) {
      for (Index i = n - 1; i >= 0; --i) stack.push_back({fr.prod * a[static_cast<std::size_t>(i)], fr.depth + 1});
    }
  }

  PRadiusResult out;
  double count = 1.0;
  for (Index k = 1; k <= k_max; ++k) {
    count *= static_cast<double>(n);
    const double ak = std::pow(sums[static_cast<std::size_t>(k - 1)] / count, 1.0 / p);
    out.a.push_back(ak);
    out.roots.push_back(std::pow(ak, 1.0 / static_cast<double>(k)));
    if (out.certified_depth == 0 && out.roots.back() < 1.0 - tol.margin_tol) out.certified_depth = k;
  }
  CMatrix stacked(n * d, d);
  for (Index k = 0; k < n; ++k) stacked.middleRows(k * d, d) = f[k];
  out.common_kernel_dim = null_space(stacked, tol).cols();
  if (out.certified_depth > 0) {
    out.status = PRadiusStatus::Certified;
  } else if (out.common_kernel_dim > 0 && std::abs(out.roots.back() - 1.0) <= tol.margin_tol) {
    out.status = PRadiusStatus::Deficient;
  }
  return out;
}

/// Residual ‖S^{1/2} − Σ_{i,j} a_i² S^{−3/2} a_j²‖ with S = Σ a_k².
inline double m_membership_identity(const OperatorFamily& f, const Tolerances& tol = {}) {
  const Index d = f.ambient_dim();
  CMatrix s = CMatrix::Zero(d, d);
  std::vector<CMatrix> squares;
  for (const auto& m : f.members()) {
    squares.push_back(m * m);
    s += squares.back();
  }
  if (d == 0) return 0.0;
  if (!(eigvals_hermitian(hermitian_part(s), tol)(0) > tol.margin_tol)) {
    throw Error(ErrorKind::NotInvertible, "Σ a_k² is not invertible");
  }
  const CMatrix root = sqrt_psd(hermitian_part(s), tol);
  const CMatrix mid = inverse_power_pd(hermitian_part(s), 1.5, tol);
  CMatrix rhs = CMatrix::Zero(d, d);
  for (const auto& si : squares)
    for (const auto& sj : squares) rhs += si * mid * sj;
  return op_norm(root - rhs);
}

enum class BetaClass { PositiveDefinite, B1B2, Borderline, Neither };

inline const char* to_string(BetaClass c) {
  switch (c) {
    case BetaClass::PositiveDefinite: return "positive_definite";
    case BetaClass::B1B2: return "b1_b2";
    case BetaClass::Borderline: return "borderline";
    case BetaClass::Neither: return "neither";
  }
  return "unknown";
}

/// β_ii = α_ii, β_ij = −½√((Re α_ij + Re α_ji)² + (Im α_ij − Im α_ji)²).
struct BetaMatrix {
  CMatrix alpha;
  RMatrix beta;
  RVector eigenvalues;
  BetaClass classification = BetaClass::Neither;
  bool graph_connected = false;
  Index zero_multiplicity = 0;
  RVector kernel;  // positive kernel vector with unit mean, when (B1)(B2) hold
};

inline BetaMatrix beta_matrix(const CMatrix& alpha, const Tolerances& tol = {}) {
  require_square(alpha, "alpha");
  const Index n = alpha.rows();
  BetaMatrix b;
  b.alpha = alpha;
  b.beta = RMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (!(alpha(i, i).real() > 0.0) || std::abs(alpha(i, i).imag()) > tol.eig_tol) {
      throw Error(ErrorKind::DiagonalNotPositive, "alpha_" + std::to_string(i + 1) + std::to_string(i + 1) +
                                                      " must be a positive real");
    }
    b.beta(i, i) = alpha(i, i).real();
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double re = alpha(i, j).real() + alpha(j, i).real();
      const double im = alpha(i, j).imag() - alpha(j, i).imag();
      b.beta(i, j) = -0.5 * std::sqrt(re * re + im * im);
    }
  }

  // Connectivity of the graph with edges where β_ij ≠ 0.
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Index> todo{0};
  seen[0] = true;
  Index reached = 1;
  while (!todo.empty()) {
    const Index v = todo.back();
    todo.pop_back();
    for (Index w = 0; w < n; ++w) {
      if (w != v && !seen[static_cast<std::size_t>(w)] && std::abs(b.beta(v, w)) > 0.0) {
        seen[static_cast<std::size_t>(w)] = true;
        ++reached;
        todo.push_back(w);
      }
    }
  }
  b.graph_connected = reached == n;

  Eigen::SelfAdjointEigenSolver<RMatrix> solver(b.beta);
  b.eigenvalues = solver.eigenvalues();
  const double scale = std::max(1.0, b.eigenvalues.cwiseAbs().maxCoeff());
  const double zero_band = tol.rank_tol * scale;
  bool ambiguous = false, negative = false;
  for (Index i = 0; i < n; ++i) {
    const double l = b.eigenvalues(i);
    if (std::abs(l) <= zero_band) {
      ++b.zero_multiplicity;
    } else if (std::abs(l) <= tol.margin_tol) {
      ambiguous = true;
    } else if (l < 0.0) {
      negative = true;
    }
  }
  if (b.eigenvalues(0) > tol.margin_tol) {
    b.classification = BetaClass::PositiveDefinite;
  } else if (ambiguous) {
    b.classification = BetaClass::Borderline;
  } else if (!negative && b.zero_multiplicity == 1 && b.graph_connected) {
    b.classification = BetaClass::B1B2;
    RVector s = solver.eigenvectors().col(0).cwiseAbs();
    b.kernel = s / s.mean();
  }
  return b;
}

/// α for the ξ-graph family: α_ii = ξ_i = ½Σ_{j∼i}(ξ_ij + ξ_ji), α_ij = −ξ_ij on edges.
/// `xi` holds ξ_ij at (i, j); entries off the graph must be zero.
inline CMatrix xi_family_alpha(const RMatrix& xi) {
  require_square(xi.cast<cplx>(), "xi");
  const Index n = xi.rows();
  CMatrix alpha = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      diag += 0.5 * (xi(i, j) + xi(j, i));
      alpha(i, j) = -xi(i, j);
    }
    alpha(i, i) = diag;
  }
  return alpha;
}

/// Directed unit cycle ξ_{i,i+1} = 1, so A = ΣP_i − ΣP_iP_{i+1}.
inline CMatrix cycle_alpha(Index n) {
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "a cycle needs at least three vertices");
  RMatrix xi = RMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) xi(i, (i + 1) % n) = 1.0;
  return xi_family_alpha(xi);
}

struct QuadraticCriterion {
  BetaMatrix beta;
  CMatrix a;
  MarginReport report;
};

/// A = Σ α_ij P_i P_j with the β-matrix classification.
///
/// Entries: "closed_range" (smallest nonzero singular value of A), "invertibility"
/// (σ_min(A), only when ΣH_k and ΣH_k⊥ are both the whole space). Flags:
/// "range_equals_sum", "ones_in_kernel" (B·(1,…,1) = 0).
inline QuadraticCriterion quadratic_projector_criterion(const SubspaceSystem& s, const CMatrix& alpha,
                                                        const Tolerances& tol = {}) {
  const Index n = s.size();
  if (alpha.rows() != n || alpha.cols() != n) throw Error(ErrorKind::DimensionMismatch, "alpha must be n x n");
  QuadraticCriterion out;
  out.beta = beta_matrix(alpha, tol);
  const std::vector<CMatrix> p = s.projectors();
  const Index d = s.ambient_dim();
  out.a = CMatrix::Zero(d, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (alpha(i, j) == cplx(0.0, 0.0)) continue;
      out.a += alpha(i, j) * (i == j ? p[static_cast<std::size_t>(i)]
                                     : CMatrix(p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)]));
    }

  MarginReport& r = out.report;
  const double scale = op_norm(alpha);
  r.add("closed_range", smallest_nonzero_singular_value(out.a, tol, scale), tol);
  const Subspace range = from_spanning(out.a, tol, scale);
  const Subspace total = sum_span(s, tol);
  const double dist = projector_distance(range, total);
  r.values["range_distance"] = dist;
  r.flags["range_equals_sum"] = dist <= tol.margin_tol;

  std::vector<Subspace> comps;
  for (const auto& m : s.members()) comps.push_back(complement(m, tol));
  const bool sum_full = total.dim() == d;
  const bool comp_full = sum_span(comps, d, tol).dim() == d;
  r.flags["invertibility_applicable"] = sum_full && comp_full;
  if (sum_full && comp_full) r.add("invertibility", smallest_singular_value(out.a), tol);

  const RVector ones = RVector::Ones(n);
  const double kernel_residual = (out.beta.beta * ones).norm() / ones.norm();
  r.values["ones_kernel_residual"] = kernel_residual;
  r.flags["ones_in_kernel"] = kernel_residual <= tol.margin_tol;
  r.values["beta_min_eigenvalue"] = out.beta.eigenvalues(0);
  return out;
}

/// Inverse best approximation check for A_k with Im A_k ⊆ H_k.
///
/// Entries: "ibap" (σ_min of y ↦ Σ A_k* y_k on ⊕H_k), "embedding_k" (σ_min of
/// A_k* restricted to H_k) and "range_independence" (independence of A_k*(H_k)).
inline MarginReport ibap_check(const SubspaceSystem& s, const OperatorFamily& a, const Tolerances& tol = {}) {
  if (a.size() != s.size() || a.ambient_dim() != s.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "need one d x d operator per member");
  }
  const Index d = s.ambient_dim();
  std::vector<CMatrix> blocks;
  std::vector<Subspace> ranges;
  Index total = 0;
  for (Index k = 0; k < s.size(); ++k) {
    const CMatrix& ak = a[k];
    if (op_norm(ak - s[k].projector() * ak) > tol.margin_tol) {
      throw Error(ErrorKind::RangeConditionViolated, "Im A_" + std::to_string(k + 1) + " leaves H_" + std::to_string(k + 1));
    }
    blocks.push_back(ak.adjoint() * s[k].basis());
    ranges.push_back(from_spanning(blocks.back(), tol));
    total += blocks.back().cols();
  }
  CMatrix w(d, total);
  Index at = 0;
  for (const auto& b : blocks) {
    w.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  MarginReport r;
  r.add("ibap", smallest_singular_value(w), tol);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    r.add("embedding_" + std::to_string(k + 1), smallest_singular_value(blocks[k]), tol);
  }
  r.add("range_independence", independence_certificate(SubspaceSystem(d, ranges), tol).epsilon, tol);
  return r;
}

}  // namespace closedsum
