#pragma once

#include <closedsum/margins.hpp>
#include <closedsum/subspaces.hpp>

#include <numeric>
#include <vector>

namespace closedsum {

/// Canonical two-projection decomposition of a pair (H1, H2).
///
/// C^d splits into the four intersections plus K ⊕ K. The first K copy sits in
/// H1 with basis `k_first` (columns u_i); the second copy sits in H1⊥ with basis
/// `k_second` (columns w_i). In this basis P1 = diag(I, 0) and
/// P2 = [[a, √(a(1−a))], [√(a(1−a)), 1−a]] with a diagonal and ascending.
struct PairDecomposition {
  Subspace both;         // H1 ∩ H2
  Subspace first_only;   // H1 ∩ H2⊥
  Subspace second_only;  // H1⊥ ∩ H2
  Subspace neither;      // H1⊥ ∩ H2⊥
  CMatrix k_first;
  CMatrix k_second;
  RVector a;        // eigenvalues of the generic part, in (0, 1)
  RVector cosines;  // √a, computed directly
  RVector sines;    // √(1−a), computed directly

  Index ambient_dim() const { return both.ambient_dim(); }
  Index generic_dim() const { return a.size(); }

  CMatrix a_operator() const { return a.cast<cplx>().asDiagonal(); }

  /// Columns v_i = cos_i u_i + sin_i w_i spanning the generic part of H2.
  CMatrix second_generic_basis() const {
    CMatrix v(ambient_dim(), generic_dim());
    for (Index i = 0; i < generic_dim(); ++i) v.col(i) = cosines(i) * k_first.col(i) + sines(i) * k_second.col(i);
    return v;
  }

  CMatrix reconstruct_p1() const {
    return both.projector() + first_only.projector() + k_first * k_first.adjoint();
  }

  CMatrix reconstruct_p2() const {
    const CMatrix v = second_generic_basis();
    return both.projector() + second_only.projector() + v * v.adjoint();
  }
};

/// Halmos decomposition via the SVD of B1* B2. Principal pairs with sin θ ≤ rank_tol
/// go to H1∩H2 and those with cos θ ≤ rank_tol to the mixed components; the rest
/// form K, sorted by ascending a = cos²θ.
inline PairDecomposition halmos_decompose(const Subspace& h1, const Subspace& h2, const Tolerances& tol = {}) {
  require_same_ambient(h1, h2);
  const Index d = h1.ambient_dim();
  const Index r1 = h1.dim();
  const Index r2 = h2.dim();

  std::vector<CVector> both, first_only, second_only;
  struct Generic {
    double c, s;
    CVector u, w;
  };
  std::vector<Generic> generic;

  const SvdResult f = svd(h1.basis().adjoint() * h2.basis(), tol);
  const Index m = std::min(r1, r2);
  for (Index i = 0; i < m; ++i) {
    const double c = std::min(1.0, f.singular_values(i));
    const CVector u = h1.basis() * f.u.col(i);
    const CVector v = h2.basis() * f.v.col(i);
    const CVector residual = v - c * u;
    const double s = residual.norm();
    if (s <= tol.rank_tol) {
      both.push_back(u);
    } else if (c <= tol.rank_tol) {
      first_only.push_back(u);
      second_only.push_back(v);
    } else {
      generic.push_back({c, s, u, residual / s});
    }
  }
  for (Index i = m; i < r1; ++i) first_only.push_back(h1.basis() * f.u.col(i));
  for (Index i = m; i < r2; ++i) second_only.push_back(h2.basis() * f.v.col(i));

  std::stable_sort(generic.begin(), generic.end(), [](const Generic& x, const Generic& y) { return x.c < y.c; });

  auto pack = [d](const std::vector<CVector>& cols) {
    CMatrix b(d, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) b.col(static_cast<Index>(j)) = cols[j];
    return Subspace::from_orthonormal(b);
  };

  PairDecomposition out;
  out.both = pack(both);
  out.first_only = pack(first_only);
  out.second_only = pack(second_only);
  const Index g = static_cast<Index>(generic.size());
  out.k_first.resize(d, g);
  out.k_second.resize(d, g);
  out.a.resize(g);
  out.cosines.resize(g);
  out.sines.resize(g);
  for (Index i = 0; i < g; ++i) {
    const auto& item = generic[static_cast<std::size_t>(i)];
    out.k_first.col(i) = item.u;
    out.k_second.col(i) = item.w;
    out.cosines(i) = item.c;
    out.sines(i) = item.s;
    out.a(i) = item.c * item.c;
  }

  const Index used = out.both.dim() + out.first_only.dim() + out.second_only.dim() + 2 * g;
  CMatrix taken(d, used);
  taken << out.both.basis(), out.first_only.basis(), out.second_only.basis(), out.k_first, out.k_second;
  out.neither = complement(from_spanning(taken, tol), tol);
  return out;
}

/// Largest eigenvalue of a (0 when K = 0).
inline double max_a(const PairDecomposition& p) { return p.generic_dim() == 0 ? 0.0 : p.a.maxCoeff(); }

/// Closedness criteria for H1 + H2, one margin per equivalent condition.
///
/// c1: 1 − max σ(a); c2: distance to 1 of σ(P1P2) with the eigenvalue 1 removed;
/// c3: 1 − ‖P1P2 − P_{H1∩H2}‖; c4: c3 for the complements; c5: smallest nonzero
/// singular value of (I−P1)P2; c6: smallest nonzero singular value of I − P1P2;
/// c7: smallest nonzero eigenvalue of P1 + P2.
inline MarginReport pair_criteria(const Subspace& h1, const Subspace& h2, const Tolerances& tol = {}) {
  require_same_ambient(h1, h2);
  const Index d = h1.ambient_dim();
  const PairDecomposition dec = halmos_decompose(h1, h2, tol);
  const CMatrix p1 = h1.projector();
  const CMatrix p2 = h2.projector();
  const CMatrix pboth = dec.both.projector();
  const CMatrix id = identity(d);

  MarginReport r;
  r.add("c1", 1.0 - max_a(dec), tol);

  {
    // σ(P1P2) ∪ {0} = σ(P1P2P1) ∪ {0}; the latter is Hermitian.
    const RVector ev = eigvals_hermitian(hermitian_part(p1 * p2 * p1), tol);
    double top = 0.0;
    for (Index i = 0; i < ev.size(); ++i)
      if (ev(i) < 1.0 - tol.eig_tol) top = std::max(top, ev(i));
    r.add("c2", 1.0 - top, tol);
  }

  r.add("c3", 1.0 - op_norm(p1 * p2 - pboth), tol);
  {
    const CMatrix q1 = id - p1;
    const CMatrix q2 = id - p2;
    const CMatrix pboth_perp = dec.neither.projector();
    r.add("c4", 1.0 - op_norm(q1 * q2 - pboth_perp), tol);
  }
  r.add("c5", smallest_nonzero_singular_value((id - p1) * p2, tol, 1.0), tol);
  r.add("c6", smallest_nonzero_singular_value(id - p1 * p2, tol, 1.0), tol);
  {
    CMatrix cat(d, h1.dim() + h2.dim());
    cat << h1.basis(), h2.basis();
    const Index kernel = d - svd(cat, tol).rank;
    const RVector ev = eigvals_hermitian(p1 + p2, tol);
    r.add("c7", kernel < d ? ev(kernel) : kInfinity, tol);
  }
  r.values["max_a"] = max_a(dec);
  r.values["generic_dim"] = static_cast<double>(dec.generic_dim());
  r.values["dim_intersection"] = static_cast<double>(dec.both.dim());
  return r;
}

/// Friedrichs angle: arccos √‖a‖, and π/2 when K = 0.
inline double friedrichs_angle(const Subspace& h1, const Subspace& h2, const Tolerances& tol = {}) {
  const PairDecomposition dec = halmos_decompose(h1, h2, tol);
  if (dec.generic_dim() == 0) return std::acos(0.0);
  return std::acos(std::min(1.0, dec.cosines.maxCoeff()));
}

/// Constants describing linear independence of the pair.
///
/// Entries: "independent_closed" with margin 1 − ‖P1P2‖; "gram" with the smallest
/// eigenvalue of [[I, B1*B2], [B2*B1, I]]; "complement_embedding" with the smallest
/// singular value of (I − P1)B2.
inline MarginReport independent_pair_constants(const Subspace& h1, const Subspace& h2, const Tolerances& tol = {}) {
  require_same_ambient(h1, h2);
  const Index d = h1.ambient_dim();
  const CMatrix p1 = h1.projector();
  const double norm12 = op_norm(p1 * h2.projector());

  MarginReport r;
  r.values["norm_p1p2"] = norm12;
  r.add("independent_closed", 1.0 - norm12, tol);

  const Index total = h1.dim() + h2.dim();
  if (total == 0) {
    r.add("gram", kInfinity, tol);
  } else {
    CMatrix cat(d, total);
    cat << h1.basis(), h2.basis();
    r.add("gram", eigvals_hermitian(cat.adjoint() * cat, tol)(0), tol);
  }
  r.add("complement_embedding", smallest_singular_value((identity(d) - p1) * h2.basis()), tol);
  return r;
}

}  // namespace closedsum
