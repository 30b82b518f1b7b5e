#pragma once

#include <closedsum/margins.hpp>
#include <closedsum/pairs.hpp>
#include <closedsum/systems.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace closedsum {

using Rational = boost::multiprecision::cpp_rational;

/// Best ε in ‖Σx_i‖² ≥ ε Σ‖x_i‖² over x_i ∈ H_i.
struct IndependenceCertificate {
  double epsilon = kInfinity;
  bool independent = true;
};

inline IndependenceCertificate independence_certificate(const SubspaceSystem& s, const Tolerances& tol = {}) {
  IndependenceCertificate c;
  const CMatrix b = s.concatenated_basis();
  if (b.cols() == 0) return c;
  c.epsilon = eigvals_hermitian(b.adjoint() * b, tol)(0);
  c.independent = c.epsilon > tol.margin_tol;
  return c;
}

/// Riesz projections Q_k x = x_k of an independent system whose sum is the whole space.
inline std::vector<CMatrix> oblique_projections(const SubspaceSystem& s, const Tolerances& tol = {}) {
  if (!independence_certificate(s, tol).independent) {
    throw Error(ErrorKind::NotIndependent, "oblique projections need a linearly independent system");
  }
  if (s.total_rank() != s.ambient_dim()) {
    throw Error(ErrorKind::SumNotFull, "oblique projections need the members to span the whole space");
  }
  const CMatrix b = s.concatenated_basis();
  const CMatrix inv = b.partialPivLu().inverse();
  const std::vector<Index> off = s.offsets();
  std::vector<CMatrix> out;
  for (Index k = 0; k < s.size(); ++k) {
    out.push_back(s[k].basis() * inv.middleRows(off[static_cast<std::size_t>(k)], s[k].dim()));
  }
  return out;
}

/// A = Σ λ_k Q_k; its spectral projectors are the Q_k.
inline CMatrix riesz_operator(const std::vector<CMatrix>& q, const std::vector<cplx>& lambdas) {
  if (q.size() != lambdas.size()) throw Error(ErrorKind::DimensionMismatch, "one eigenvalue per projection");
  if (q.empty()) return CMatrix(0, 0);
  CMatrix a = CMatrix::Zero(q.front().rows(), q.front().cols());
  for (std::size_t k = 0; k < q.size(); ++k) a += lambdas[k] * q[k];
  return a;
}

/// Quadratic-form RPS constant for the split after the first m members.
///
/// Over Z = {y ∈ ⊕H_j : Σy_j = 0}, minimizes Σ_{j>m}‖y_j‖² subject to
/// Σ_{j≤m}‖y_j‖² = 1. With N an orthonormal basis of Z and μ the eigenvalues of
/// N* D N (D selects the first m blocks), ε² = (1 − μ_max)/μ_max.
/// Entries: "rps" (ε) and "prefix_independence".
inline MarginReport rps_margin(const SubspaceSystem& s, Index m, const Tolerances& tol = {}) {
  if (m < 1 || m > s.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "m must lie in 1.." + std::to_string(s.size()));
  }
  const CMatrix b = s.concatenated_basis();
  const std::vector<Index> off = s.offsets();
  const Index head = m < s.size() ? off[static_cast<std::size_t>(m)] : b.cols();
  const CMatrix n = null_space(b, tol, 1.0);

  MarginReport r;
  r.values["kernel_dim"] = static_cast<double>(n.cols());
  if (n.cols() == 0 || head == 0) {
    r.add("rps", kInfinity, tol);
  } else {
    const CMatrix top = n.topRows(head);
    const RVector mu = eigvals_hermitian(top.adjoint() * top, tol);
    const double mu_max = mu(mu.size() - 1);
    if (mu_max <= tol.eig_tol) {
      r.add("rps", kInfinity, tol);
    } else {
      const double eps2 = std::max(0.0, (1.0 - mu_max) / mu_max);
      r.values["epsilon_squared"] = eps2;
      r.add("rps", std::sqrt(eps2), tol);
    }
  }
  std::vector<Index> prefix;
  for (Index i = 0; i < m; ++i) prefix.push_back(i);
  r.add("prefix_independence", independence_certificate(s.subsystem(prefix), tol).epsilon, tol);
  return r;
}

struct PairReduction {
  Subspace m2;
  double delta = 0.0;
  bool retried = false;
  MarginReport report;
};

/// Shrinks H2 to M2 ⊆ H2 so that H1 + M2 is closed with explicit constants.
///
/// M2 is the generic part of H2 over eigenvalues a < δ = 1 − ε/2, plus H1⊥ ∩ H2.
/// Entries: "closed_sum" (gap of P1 + P_M2), "domination"
/// (λ_min(3(P1 + P_M2) + εI − P1 − P2)), "lower_bound" (λ_min(P1 + P_M2 − (ε/4)P_{H1+M2})).
inline PairReduction reduce_pair(const Subspace& h1, const Subspace& h2, double eps, const Tolerances& tol = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  require_same_ambient(h1, h2);
  const Index d = h1.ambient_dim();
  const PairDecomposition dec = halmos_decompose(h1, h2, tol);

  PairReduction out;
  out.delta = 1.0 - eps / 2.0;
  CMatrix keep;
  try {
    keep = spectral_projector(dec.a_operator(), {-1.0, out.delta}, tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EigenvalueOnBoundary) throw;
    out.delta += 10.0 * tol.eig_tol;
    out.retried = true;
    keep = spectral_projector(dec.a_operator(), {-1.0, out.delta}, tol);
  }

  const CMatrix v = dec.second_generic_basis();
  std::vector<Index> kept;
  for (Index i = 0; i < dec.generic_dim(); ++i)
    if (keep(i, i).real() > 0.5) kept.push_back(i);
  CMatrix basis(d, static_cast<Index>(kept.size()) + dec.second_only.dim());
  for (std::size_t j = 0; j < kept.size(); ++j) basis.col(static_cast<Index>(j)) = v.col(kept[j]);
  basis.rightCols(dec.second_only.dim()) = dec.second_only.basis();
  out.m2 = from_spanning(basis, tol);

  const CMatrix p1 = h1.projector();
  const CMatrix pm = out.m2.projector();
  const Subspace joint = sum_span(h1, out.m2, tol);
  MarginReport& r = out.report;
  {
    const RVector ev = eigvals_hermitian(p1 + pm, tol);
    const Index kernel = d - joint.dim();
    r.add("closed_sum", joint.dim() == 0 ? kInfinity : ev(kernel), tol);
  }
  r.add("domination", eigvals_hermitian(3.0 * (p1 + pm) + eps * identity(d) - p1 - h2.projector(), tol)(0), tol);
  r.add("lower_bound", eigvals_hermitian(p1 + pm - (eps / 4.0) * joint.projector(), tol)(0), tol);
  r.values["eps"] = eps;
  r.values["delta"] = out.delta;
  r.values["kept_dim"] = static_cast<double>(out.m2.dim());
  r.values["dropped_dim"] = static_cast<double>(dec.generic_dim() - static_cast<Index>(kept.size()));
  r.values["containment_defect"] = op_norm(out.m2.basis() - h2.projector() * out.m2.basis());
  r.flags["retried"] = out.retried;
  return out;
}

/// c_2 = 1/2 and c_n = c_{n−1} / (16·24^{n−2}); c_1 = 1.
inline Rational reduction_constant(Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "reduction constant needs n >= 1");
  if (n == 1) return Rational(1);
  Rational c(1, 2);
  for (Index k = 3; k <= n; ++k) {
    boost::multiprecision::cpp_int den = 16;
    for (Index j = 0; j < k - 2; ++j) den *= 24;
    c /= Rational(den);
  }
  return c;
}

struct ReductionResult {
  SubspaceSystem reduced;  // (H_1, M_2, …, M_n)
  double epsilon = 0.0;    // gap used by the certificate
  Rational c_n;
  std::vector<double> weights;  // weight of each member in the certificate
  MarginReport certificate;
  bool sum_preserved = false;
  bool numerically_vacuous = false;
};

namespace detail {

/// Recursion of the reduction theorem, in coordinates where ΣP ≥ εI.
/// Returns M_2..M_n for the members; `steps` collects the pair-lemma reports.
inline std::vector<Subspace> reduce_recursive(const std::vector<Subspace>& h, double eps, const Tolerances& tol,
                                              MarginReport& steps, double& smallest_eps, Index level) {
  std::vector<Subspace> out;
  if (h.size() < 2) return out;
  const Subspace meet = intersect(h[0], h[1], tol);
  const Subspace h2p = orthogonal_difference(h[1], meet, tol);
  if (h.size() == 2) {
    out.push_back(h2p);
    return out;
  }
  smallest_eps = std::min(smallest_eps, eps / 24.0);
  const PairReduction pr = reduce_pair(h[0], h2p, eps / 4.0, tol);
  steps.merge(pr.report, "step" + std::to_string(level + 2) + "_");
  out.push_back(pr.m2);
  std::vector<Subspace> next;
  next.push_back(sum_span(h[0], pr.m2, tol));
  for (std::size_t k = 2; k < h.size(); ++k) next.push_back(h[k]);
  for (auto& m : reduce_recursive(next, eps / 24.0, tol, steps, smallest_eps, level + 1)) out.push_back(std::move(m));
  return out;
}

inline ReductionResult reduce_system_impl(const SubspaceSystem& s, const Tolerances& tol, bool require_gap) {
  const SumSpectrum spec = sum_spectrum(s, tol);
  const Index n = s.size();
  if (require_gap && !(spec.gap > tol.margin_tol)) {
    throw Error(ErrorKind::GapTooSmall, "gap " + std::to_string(spec.gap) + " does not exceed margin_tol");
  }

  ReductionResult res{s, spec.gap, reduction_constant(n), {}, {}, false, false};
  if (spec.sum_dim == 0) {
    res.sum_preserved = true;
    res.weights.assign(static_cast<std::size_t>(n), 1.0);
    res.certificate.add("certificate", kInfinity, tol);
    return res;
  }

  // Work inside ΣH_k, where ΣP ≥ gap·I. Any smaller ε is still a valid bound; the
  // pair lemma needs ε/4 < 1, so ε is capped at 2.
  const CMatrix frame = column_space(s.concatenated_basis(), tol);
  std::vector<Subspace> local;
  for (const auto& m : s.members()) local.push_back(restrict_to(m, frame, tol));
  const double eps = std::min(spec.gap, 2.0);
  res.epsilon = eps;

  double smallest = eps;
  MarginReport steps;
  const std::vector<Subspace> ms = reduce_recursive(local, eps, tol, steps, smallest, 0);

  std::vector<Subspace> reduced_local{local[0]};
  for (const auto& m : ms) reduced_local.push_back(m);

  res.weights.assign(static_cast<std::size_t>(n), 1.0);
  for (Index k = 3; k <= n; ++k) {
    res.weights[static_cast<std::size_t>(k - 1)] = std::pow(eps, static_cast<double>(k - 2)) /
                                                    (16.0 * std::pow(24.0, static_cast<double>(k - 3)));
  }
  const double bound = static_cast<double>(res.c_n) * std::pow(eps, static_cast<double>(n - 1));

  const Index dim = frame.cols();
  CMatrix lhs = -bound * identity(dim);
  for (Index k = 0; k < n; ++k) lhs += res.weights[static_cast<std::size_t>(k)] * reduced_local[static_cast<std::size_t>(k)].projector();
  res.certificate.add("certificate", eigvals_hermitian(lhs, tol)(0), tol);
  res.certificate.values["bound"] = bound;
  res.certificate.values["c_n"] = static_cast<double>(res.c_n);
  res.certificate.values["epsilon"] = eps;
  res.certificate.merge(steps);

  std::vector<Subspace> reduced;
  for (const auto& m : reduced_local) reduced.push_back(embed_from(m, frame));
  res.reduced = SubspaceSystem(s.ambient_dim(), std::move(reduced));

  const IndependenceCertificate ind = independence_certificate(res.reduced, tol);
  res.certificate.add("independence", ind.epsilon, tol);
  const double dist = projector_distance(sum_span(res.reduced, tol), sum_span(s, tol));
  res.certificate.values["sum_distance"] = dist;
  res.sum_preserved = dist <= tol.margin_tol;
  res.numerically_vacuous = bound < tol.margin_tol || smallest < tol.margin_tol;
  res.certificate.flags["sum_preserved"] = res.sum_preserved;
  res.certificate.flags["numerically_vacuous"] = res.numerically_vacuous;
  return res;
}

}  // namespace detail

/// Constructive reduction to (H_1, M_2, …, M_n) with M_k ⊆ H_k, independent, and
/// P_{H1} + P_{M2} + Σ_{k≥3} w_k P_{Mk} ≥ c_n ε^{n−1} I on ΣH_k, where
/// w_k = ε^{k−2} / (16·24^{k−3}) and ε is the gap of ΣP_k.
inline ReductionResult reduce_system(const SubspaceSystem& s, const Tolerances& tol = {}) {
  return detail::reduce_system_impl(s, tol, true);
}

/// Reduction that keeps H_1 and the sum H_1 + … + H_n intact, obtained by running
/// reduce_system in ⊕H_k on (Δ_0 + H̃_1, H̃_2, …, H̃_n) with Δ_0 the kernel of the sum map.
inline ReductionResult reduce_preserving_sum(const SubspaceSystem& s, const Tolerances& tol = {}) {
  const CMatrix b = s.concatenated_basis();
  const Index total = b.cols();
  const Index n = s.size();
  if (total == 0 || n == 1) {
    ReductionResult res{s, 0.0, reduction_constant(n), std::vector<double>(static_cast<std::size_t>(n), 1.0), {}, true, false};
    res.certificate.add("independence", independence_certificate(s, tol).epsilon, tol);
    res.certificate.flags["sum_preserved"] = true;
    return res;
  }

  const std::vector<Index> off = s.offsets();
  const CMatrix first_defect = b - s[0].projector() * b;  // (I − P_1)B
  std::vector<Subspace> lifted;
  lifted.push_back(Subspace::from_orthonormal(null_space(first_defect, tol, 1.0)));
  for (Index k = 1; k < n; ++k) {
    CMatrix e = CMatrix::Zero(total, s[k].dim());
    e.middleRows(off[static_cast<std::size_t>(k)], s[k].dim()) = identity(s[k].dim());
    lifted.push_back(Subspace::from_orthonormal(e));
  }
  const ReductionResult inner = detail::reduce_system_impl(SubspaceSystem(total, lifted), tol, false);

  std::vector<Subspace> reduced{s[0]};
  for (Index k = 1; k < n; ++k) reduced.push_back(from_spanning(b * inner.reduced[k].basis(), tol));

  ReductionResult res{SubspaceSystem(s.ambient_dim(), std::move(reduced)), inner.epsilon, inner.c_n, inner.weights, {},
                      false, inner.numerically_vacuous};
  res.certificate.merge(inner.certificate, "dilation_");
  const IndependenceCertificate ind = independence_certificate(res.reduced, tol);
  res.certificate.add("independence", ind.epsilon, tol);
  const double dist = projector_distance(sum_span(res.reduced, tol), sum_span(s, tol));
  res.certificate.values["sum_distance"] = dist;
  res.sum_preserved = dist <= tol.margin_tol;
  res.certificate.flags["sum_preserved"] = res.sum_preserved;
  res.certificate.flags["numerically_vacuous"] = res.numerically_vacuous;
  return res;
}

}  // namespace closedsum
