#pragma once

// Block-diagonal models of infinite direct sums: a deterministic generator
// k ↦ SubspaceSystem plus a horizon. Verdicts are always relative to the horizon.

#include <closedsum/generators.hpp>
#include <closedsum/pairs.hpp>
#include <closedsum/systems.hpp>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace closedsum {

class BlockSystem {
 public:
  using Generator = std::function<SubspaceSystem(Index k)>;  // k = 1, 2, …

  BlockSystem(std::string name, Index members, Generator gen) : name_(std::move(name)), members_(members), gen_(std::move(gen)) {}

  const std::string& name() const { return name_; }
  Index members() const { return members_; }

  SubspaceSystem block(Index k) const {
    SubspaceSystem s = gen_(k);
    if (s.size() != members_) throw Error(ErrorKind::DimensionMismatch, "block has the wrong member count");
    return s;
  }

 private:
  std::string name_;
  Index members_;
  Generator gen_;
};

/// Same block for every k.
inline BlockSystem constant_blocks(const SubspaceSystem& s, std::string name = "constant") {
  return BlockSystem(std::move(name), s.size(), [s](Index) { return s; });
}

using FamilyParams = std::map<std::string, double>;

/// Built-in families.
///
/// one_over_k (n ≥ 2): block C^n with lines e_1, …, e_{n−1} and e_1 + … + e_{n−1} + e_n/k.
/// halmos_accumulating (n = 2, param "rate" p, default 1): lines in C^2 with
/// a-eigenvalue 1 − k^{−p}.
/// compact_triple (n = 3): blocks of C^2 with P1 = diag(0,1), P2 = diag(1,0) and
/// P3 = [[1−a², a√(1−a²)], [a√(1−a²), a²]] for a = 1/k.
inline BlockSystem named_families(const std::string& name, const FamilyParams& params, Index n) {
  auto param = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "one_over_k") {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "one_over_k needs n >= 2");
    return BlockSystem(name, n, [n](Index k) {
      std::vector<Subspace> members;
      for (Index i = 0; i + 1 < n; ++i) members.push_back(coordinate_line(n, i));
      CVector v = CVector::Ones(n);
      v(n - 1) = 1.0 / static_cast<double>(k);
      members.push_back(line(v));
      return SubspaceSystem(n, std::move(members));
    });
  }
  if (name == "halmos_accumulating") {
    if (n != 2) throw Error(ErrorKind::InvalidArgument, "halmos_accumulating is a pair family (n = 2)");
    const double rate = param("rate", 1.0);
    if (!(rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "rate must be positive");
    return BlockSystem(name, 2, [rate](Index k) {
      const double a = 1.0 - std::pow(static_cast<double>(k), -rate);
      CVector u(2), v(2);
      u << 1.0, 0.0;
      v << std::sqrt(a), std::sqrt(1.0 - a);
      return SubspaceSystem(2, {line(u), line(v)});
    });
  }
  if (name == "compact_triple") {
    if (n != 3) throw Error(ErrorKind::InvalidArgument, "compact_triple has three members");
    return BlockSystem(name, 3, [](Index k) {
      const double a = 1.0 / static_cast<double>(k);
      CVector e1(2), e2(2), v(2);
      e1 << 1.0, 0.0;
      e2 << 0.0, 1.0;
      v << std::sqrt(1.0 - a * a), a;
      return SubspaceSystem(2, {line(e2), line(e1), line(v)});
    });
  }
  throw Error(ErrorKind::UnknownFamily, "unknown family '" + name + "'");
}

enum class ClosednessStatus { ClosedOnHorizon, GapVanishing, Inconclusive };

inline const char* to_string(ClosednessStatus s) {
  switch (s) {
    case ClosednessStatus::ClosedOnHorizon: return "closed_on_horizon";
    case ClosednessStatus::GapVanishing: return "gap_vanishing";
    case ClosednessStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct ClosednessVerdict {
  ClosednessStatus status = ClosednessStatus::Inconclusive;
  double inf_gap = kInfinity;
  std::vector<double> gaps;  // per block, k = 1..K (+inf for a zero block sum)
  double slope = 0.0;        // least-squares slope of log gap against log k, top half of the horizon
  double intercept = 0.0;
  double fit_residual = 0.0;  // RMS residual of that fit
  bool decreasing = false;    // gaps non-increasing over the top half
};

struct TrendRule {
  double flat_slope = 0.1;       // |slope| below this counts as flat
  double decay_slope = -0.5;     // slope at or below this counts as decaying
  double max_fit_residual = 0.1;
};

/// Per-block gap of Σ_{j∈subset} P_j for k = 1..K, the infimum and a log-log trend.
///
/// gap_vanishing: the top-half gaps never increase and either the infimum is below
/// margin_tol or the fitted slope shows clean power-law decay. closed_on_horizon:
/// the infimum exceeds margin_tol and the trend is flat. Anything else is inconclusive.
inline ClosednessVerdict certify(const BlockSystem& bs, const std::vector<Index>& subset, Index horizon,
                                 const Tolerances& tol = {}, const TrendRule& rule = {}) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
  for (Index j : subset)
    if (j < 0 || j >= bs.members()) throw Error(ErrorKind::IndexOutOfRange, "subset index " + std::to_string(j + 1));
  if (subset.empty()) throw Error(ErrorKind::InvalidArgument, "empty subset");

  ClosednessVerdict v;
  for (Index k = 1; k <= horizon; ++k) {
    const double g = sum_spectrum(bs.block(k).subsystem(subset), tol).gap;
    v.gaps.push_back(g);
    v.inf_gap = std::min(v.inf_gap, g);
  }

  const Index start = horizon / 2 + 1;  // top half: k = ⌊K/2⌋+1 .. K
  std::vector<double> xs, ys;
  v.decreasing = true;
  double prev = kInfinity;
  for (Index k = start; k <= horizon; ++k) {
    const double g = v.gaps[static_cast<std::size_t>(k - 1)];
    if (g > prev * (1.0 + tol.eig_tol) + tol.eig_tol) v.decreasing = false;
    prev = g;
    if (std::isfinite(g) && g > 0.0) {
      xs.push_back(std::log(static_cast<double>(k)));
      ys.push_back(std::log(g));
    }
  }
  if (xs.size() >= 2) {
    Eigen::MatrixXd design(static_cast<Index>(xs.size()), 2);
    Eigen::VectorXd rhs(static_cast<Index>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      design(static_cast<Index>(i), 0) = xs[i];
      design(static_cast<Index>(i), 1) = 1.0;
      rhs(static_cast<Index>(i)) = ys[i];
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    v.slope = coef(0);
    v.intercept = coef(1);
    v.fit_residual = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<double>(xs.size()));
  }

  const bool flat = std::abs(v.slope) <= rule.flat_slope;
  const bool decaying = v.slope <= rule.decay_slope && v.fit_residual <= rule.max_fit_residual;
  if (v.decreasing && (v.inf_gap < tol.margin_tol || (xs.size() >= 2 && decaying))) {
    v.status = ClosednessStatus::GapVanishing;
  } else if (v.inf_gap > tol.margin_tol && flat) {
    v.status = ClosednessStatus::ClosedOnHorizon;
  }
  return v;
}

inline std::vector<Index> all_members(Index n) {
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i) out.push_back(i);
  return out;
}

struct SumAsTwoBlock {
  Subspace m1;  // spectral subspace of ΣP_k for eigenvalues ≥ ε
  Subspace m2;  // graph over the eigenvalues below ε
  Subspace target;  // ΣH_j
  double epsilon = 0.0;
};

struct SumAsTwo {
  std::vector<SumAsTwoBlock> blocks;
  MarginReport report;
};

namespace detail {

/// Splitting level for one block: 1/2 when at most half of the spectrum lies below it
/// and no eigenvalue is close to it; otherwise the midpoint of a spectral gap with at
/// most half of the eigenvalues below.
inline double split_level(const std::vector<double>& ev, const Tolerances& tol) {
  const std::size_t s = ev.size();
  if (s == 0) return 0.5;
  std::size_t below = 0;
  double closest = kInfinity;
  for (double l : ev) {
    if (l < 0.5) ++below;
    closest = std::min(closest, std::abs(l - 0.5));
  }
  if (below <= s - below && closest > 10.0 * tol.eig_tol) return 0.5;
  for (std::size_t t = s / 2; t >= 1; --t) {
    if (ev[t] - ev[t - 1] > 10.0 * tol.eig_tol) return 0.5 * (ev[t] + ev[t - 1]);
  }
  return 0.5 * ev[0];
}

}  // namespace detail

/// Writes ΣH_j of each block as M1 + M2.
///
/// With S = ΣP_j on ΣH_j and a split level ε, M1 = E_S[ε, ∞) and M2 is the graph
/// {D x + (I − D) J x : x ∈ E_S(0, ε)}, where D = √(S/ε) on the small part and J maps
/// the small eigenvectors onto the first bulk eigenvectors. Since D is invertible on
/// the small part, M1 ∩ M2 = 0 and M1 + M2 = ΣH_j.
inline SumAsTwo sum_as_two(const BlockSystem& bs, Index horizon, const Tolerances& tol = {}) {
  SumAsTwo out;
  double min_eps = kInfinity;
  Index worst_rank_gap = 0;
  for (Index k = 1; k <= horizon; ++k) {
    const SubspaceSystem sys = bs.block(k);
    const Index d = sys.ambient_dim();
    SumAsTwoBlock blk;
    blk.target = sum_span(sys, tol);
    const CMatrix frame = blk.target.basis();
    if (frame.cols() == 0) {
      blk.m1 = blk.m2 = Subspace::zero(d);
      out.blocks.push_back(blk);
      continue;
    }
    const CMatrix local = frame.adjoint() * sys.sum_of_projectors() * frame;
    const HermitianSpectrum spec = eig_hermitian(local, tol);
    std::vector<double> ev(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.eigenvalues.size());
    blk.epsilon = detail::split_level(ev, tol);
    min_eps = std::min(min_eps, blk.epsilon);

    std::vector<Index> small, bulk;
    for (Index i = 0; i < static_cast<Index>(ev.size()); ++i) (ev[static_cast<std::size_t>(i)] < blk.epsilon ? small : bulk).push_back(i);

    CMatrix m1(frame.cols(), static_cast<Index>(bulk.size()));
    for (std::size_t j = 0; j < bulk.size(); ++j) m1.col(static_cast<Index>(j)) = spec.eigenvectors.col(bulk[j]);
    CMatrix m2(frame.cols(), static_cast<Index>(small.size()));
    for (std::size_t j = 0; j < small.size(); ++j) {
      const double dj = std::sqrt(std::max(0.0, ev[static_cast<std::size_t>(small[j])]) / blk.epsilon);
      CVector col = dj * spec.eigenvectors.col(small[j]);
      if (j < bulk.size()) col += (1.0 - dj) * spec.eigenvectors.col(bulk[j]);
      m2.col(static_cast<Index>(j)) = col;
    }
    blk.m1 = Subspace::from_orthonormal(frame * m1);
    blk.m2 = from_spanning(frame * m2, tol);
    const Index joint = sum_span(blk.m1, blk.m2, tol).dim();
    worst_rank_gap = std::max(worst_rank_gap, std::abs(joint - blk.target.dim()));
    out.blocks.push_back(std::move(blk));
  }
  out.report.values["min_epsilon"] = min_eps;
  out.report.values["max_rank_mismatch"] = static_cast<double>(worst_rank_gap);
  out.report.flags["sum_preserved"] = worst_rank_gap == 0;
  return out;
}

}  // namespace closedsum
