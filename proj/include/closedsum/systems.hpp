#pragma once

#include <closedsum/generators.hpp>
#include <closedsum/margins.hpp>
#include <closedsum/subspaces.hpp>

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <vector>

namespace closedsum {

/// Gap of ΣP_k: its smallest nonzero eigenvalue. The kernel size is taken from the
/// rank of [B_1 … B_n] so the gap and dim ΣH_k come from one rank decision.
struct SumSpectrum {
  RVector eigenvalues;  // ascending
  Index kernel_dim = 0;
  Index sum_dim = 0;
  double gap = kInfinity;  // +inf when every member is zero
};

inline SumSpectrum sum_spectrum(const SubspaceSystem& s, const Tolerances& tol = {}) {
  SumSpectrum out;
  out.eigenvalues = eigvals_hermitian(s.sum_of_projectors(), tol);
  out.sum_dim = svd(s.concatenated_basis(), tol).rank;
  out.kernel_dim = s.ambient_dim() - out.sum_dim;
  if (out.sum_dim > 0) out.gap = out.eigenvalues(out.kernel_dim);
  return out;
}

/// Entries: "gap" (smallest nonzero eigenvalue of ΣP_k) and "full_sum"
/// (smallest eigenvalue, positive iff ΣH_k is the whole space).
inline MarginReport sum_gap(const SubspaceSystem& s, const Tolerances& tol = {}) {
  const SumSpectrum spec = sum_spectrum(s, tol);
  MarginReport r;
  r.add("gap", spec.gap, tol);
  r.add("full_sum", spec.kernel_dim == 0 ? spec.eigenvalues(0) : 0.0, tol);
  r.values["sum_dim"] = static_cast<double>(spec.sum_dim);
  r.values["kernel_dim"] = static_cast<double>(spec.kernel_dim);
  r.flags["full_sum"] = spec.kernel_dim == 0;
  return r;
}

struct Dilation {
  CMatrix p_delta;  // projector onto the diagonal {(x, …, x)}
  CMatrix p_tilde;  // diag(P_1, …, P_n)
};

inline Dilation dilation(const SubspaceSystem& s) {
  const Index d = s.ambient_dim();
  const Index n = s.size();
  Dilation out;
  out.p_delta = CMatrix::Zero(n * d, n * d);
  out.p_tilde = CMatrix::Zero(n * d, n * d);
  const CMatrix block = identity(d) / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    out.p_tilde.block(i * d, i * d, d, d) = s[i].projector();
    for (Index j = 0; j < n; ++j) out.p_delta.block(i * d, j * d, d, d) = block;
  }
  return out;
}

/// Largest deviation between the nonzero spectra of P_Δ P_H̃ P_Δ and (ΣP_k)/n.
inline double dilation_relation_residual(const SubspaceSystem& s, const Tolerances& tol = {}) {
  const Dilation dil = dilation(s);
  const RVector big = eigvals_hermitian(hermitian_part(dil.p_delta * dil.p_tilde * dil.p_delta), tol);
  const RVector small = eigvals_hermitian(s.sum_of_projectors() / static_cast<double>(s.size()), tol);
  const Index r = svd(s.concatenated_basis(), tol).rank;
  double worst = 0.0;
  for (Index i = 0; i < r; ++i) worst = std::max(worst, std::abs(big(big.size() - 1 - i) - small(small.size() - 1 - i)));
  // Everything below the top r must vanish on both sides.
  for (Index i = r; i < big.size(); ++i) worst = std::max(worst, std::abs(big(big.size() - 1 - i)));
  return worst;
}

struct Edge {
  Index i;  // 0-based
  Index j;
  double weight;
};

/// Simple undirected graph with positive weights; ρ_i is the weighted degree.
class WeightedGraph {
 public:
  WeightedGraph(Index n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw Error(ErrorKind::InvalidArgument, "graph needs at least one vertex");
    std::set<std::pair<Index, Index>> seen;
    for (const auto& e : edges_) {
      if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_) throw Error(ErrorKind::IndexOutOfRange, "edge endpoint out of range");
      if (e.i == e.j) throw Error(ErrorKind::InvalidArgument, "self loops are not allowed");
      if (!(e.weight > 0.0)) throw Error(ErrorKind::InvalidArgument, "edge weights must be positive");
      if (!seen.insert({std::min(e.i, e.j), std::max(e.i, e.j)}).second) {
        throw Error(ErrorKind::InvalidArgument, "duplicate edge");
      }
    }
    connected_ = compute_connected();
  }

  static WeightedGraph complete(Index n, double weight = 1.0) {
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
    return WeightedGraph(n, std::move(edges));
  }

  static WeightedGraph path(Index n, double weight = 1.0) {
    std::vector<Edge> edges;
    for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
    return WeightedGraph(n, std::move(edges));
  }

  static WeightedGraph cycle(Index n, double weight = 1.0) {
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
    return WeightedGraph(n, std::move(edges));
  }

  Index n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool connected() const { return connected_; }

  RVector rho() const {
    RVector r = RVector::Zero(n_);
    for (const auto& e : edges_) {
      r(e.i) += e.weight;
      r(e.j) += e.weight;
    }
    return r;
  }

 private:
  bool compute_connected() const {
    std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n_));
    for (const auto& e : edges_) {
      adj[static_cast<std::size_t>(e.i)].push_back(e.j);
      adj[static_cast<std::size_t>(e.j)].push_back(e.i);
    }
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    std::queue<Index> q;
    q.push(0);
    seen[0] = true;
    Index count = 1;
    while (!q.empty()) {
      const Index v = q.front();
      q.pop();
      for (Index w : adj[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = true;
          ++count;
          q.push(w);
        }
      }
    }
    return count == n_;
  }

  Index n_;
  std::vector<Edge> edges_;
  bool connected_ = false;
};

struct PhaseSearch {
  int phases_per_restart = 64;
  int restarts = 16;
  std::uint64_t seed = 0;
};

namespace detail {

struct ComplementFrames {
  std::vector<CMatrix> bases;
  std::vector<Index> offsets;
  Index total = 0;
};

inline ComplementFrames complement_frames(const SubspaceSystem& s, const Tolerances& tol) {
  ComplementFrames f;
  for (Index k = 0; k < s.size(); ++k) {
    f.bases.push_back(complement(s[k], tol).basis());
    f.offsets.push_back(f.total);
    f.total += f.bases.back().cols();
  }
  return f;
}

/// Q(θ) on ⊕H_k⊥: diagonal blocks ρ_i I, off-diagonal −γ_ij e^{iθ_e} C_i* C_j.
inline CMatrix graph_form(const ComplementFrames& f, const WeightedGraph& g, const std::vector<double>& phases) {
  CMatrix q = CMatrix::Zero(f.total, f.total);
  const RVector rho = g.rho();
  for (Index i = 0; i < g.n(); ++i) {
    const Index ri = f.bases[static_cast<std::size_t>(i)].cols();
    q.block(f.offsets[static_cast<std::size_t>(i)], f.offsets[static_cast<std::size_t>(i)], ri, ri) =
        rho(i) * identity(ri);
  }
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const Edge& ed = g.edges()[e];
    const auto i = static_cast<std::size_t>(ed.i);
    const auto j = static_cast<std::size_t>(ed.j);
    const cplx phase = phases.empty() ? cplx(1.0, 0.0) : std::polar(1.0, phases[e]);
    const CMatrix cross = -ed.weight * phase * (f.bases[i].adjoint() * f.bases[j]);
    q.block(f.offsets[i], f.offsets[j], cross.rows(), cross.cols()) += cross;
    q.block(f.offsets[j], f.offsets[i], cross.cols(), cross.rows()) += cross.adjoint();
  }
  return q;
}

}  // namespace detail

/// Complement certificates over a connected graph.
///
/// "graph_re": exact best ε in Σ_edges γ_ij ‖x_i − x_j‖² ≥ ε Σ‖x_k‖² over x_k ∈ H_k⊥,
/// the smallest eigenvalue of the block form Q.
/// "graph_modulus": ε with 2Σγ_ij|(x_i, x_j)| ≤ Σ(ρ_i − ε)‖x_i‖², estimated by
/// minimizing λ_min(Q(θ)) over sampled edge phases θ (θ = 0 always included, so the
/// estimate never exceeds graph_re). Flagged as an estimate.
inline MarginReport complement_graph_margin(const SubspaceSystem& s, const WeightedGraph& g, const Tolerances& tol = {},
                                            const PhaseSearch& search = {}) {
  if (g.n() != s.size()) {
    throw Error(ErrorKind::DimensionMismatch, "graph has " + std::to_string(g.n()) + " vertices, system has " +
                                                  std::to_string(s.size()) + " members");
  }
  if (!g.connected()) throw Error(ErrorKind::GraphDisconnected, "complement certificates need a connected graph");

  const detail::ComplementFrames frames = detail::complement_frames(s, tol);
  MarginReport r;
  r.values["complement_dim"] = static_cast<double>(frames.total);
  if (frames.total == 0) {
    r.add("graph_re", kInfinity, tol);
    r.add("graph_modulus", kInfinity, tol, true);
    return r;
  }

  const double exact = eigvals_hermitian(detail::graph_form(frames, g, {}), tol)(0);
  r.add("graph_re", exact, tol);

  const std::size_t m = g.edges().size();
  double best = exact;
  Rng rng(search.seed);
  std::uniform_real_distribution<double> angle(-3.14159265358979323846, 3.14159265358979323846);
  std::normal_distribution<double> step(0.0, 1.0);
  for (int restart = 0; restart < search.restarts && m > 0; ++restart) {
    std::vector<double> theta(m);
    for (auto& t : theta) t = angle(rng);
    double current = eigvals_hermitian(detail::graph_form(frames, g, theta), tol)(0);
    double radius = 1.0;
    for (int k = 1; k < search.phases_per_restart; ++k) {
      std::vector<double> trial = theta;
      for (auto& t : trial) t += radius * step(rng);
      const double value = eigvals_hermitian(detail::graph_form(frames, g, trial), tol)(0);
      if (value < current) {
        current = value;
        theta = std::move(trial);
      } else {
        radius *= 0.9;
      }
    }
    best = std::min(best, current);
  }
  r.add("graph_modulus", best, tol, true);
  r.values["seed"] = static_cast<double>(search.seed);
  return r;
}

/// Checks α_1P_1 + … + α_nP_n ≤ (Σα_i − (n−1)ε)I where ε = λ_min(Σα_iP_i).
///
/// Entries: "lower_bound" (ε), "slack" ((Σα − (n−1)ε) − λ_max), and when ε > 0
/// "independence" (smallest eigenvalue of the Gram matrix of [B_1 … B_n]).
inline MarginReport linear_combination_check(const SubspaceSystem& s, const std::vector<double>& alpha,
                                             const Tolerances& tol = {}) {
  if (static_cast<Index>(alpha.size()) != s.size()) {
    throw Error(ErrorKind::DimensionMismatch, "need one coefficient per member");
  }
  CMatrix m = CMatrix::Zero(s.ambient_dim(), s.ambient_dim());
  double total = 0.0;
  for (Index k = 0; k < s.size(); ++k) {
    const double a = alpha[static_cast<std::size_t>(k)];
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "coefficients must be positive");
    m += a * s[k].projector();
    total += a;
  }
  const RVector ev = eigvals_hermitian(m, tol);
  const double eps = ev(0);
  const double lmax = ev(ev.size() - 1);
  const double n = static_cast<double>(s.size());
  MarginReport r;
  r.add("lower_bound", eps, tol);
  r.add("slack", (total - (n - 1.0) * eps) - lmax, tol);
  r.values["lambda_max"] = lmax;
  r.values["alpha_sum"] = total;
  if (eps > tol.margin_tol) {
    const CMatrix b = s.concatenated_basis();
    r.add("independence", b.cols() == 0 ? kInfinity : eigvals_hermitian(b.adjoint() * b, tol)(0), tol);
  }
  return r;
}

}  // namespace closedsum
