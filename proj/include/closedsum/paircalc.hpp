#pragma once

#include <closedsum/pairs.hpp>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace closedsum {

/// Continuous complex function on [0, 1]. Polynomials keep their coefficients
/// (ascending powers) so they can be serialized and evaluated as matrix polynomials.
struct ScalarFunction {
  std::function<cplx(double)> evaluate;
  std::optional<std::vector<cplx>> coefficients;

  cplx operator()(double x) const { return evaluate(x); }

  static ScalarFunction polynomial(std::vector<cplx> coeffs) {
    ScalarFunction f;
    f.coefficients = coeffs;
    f.evaluate = [c = std::move(coeffs)](double x) {
      cplx acc(0.0, 0.0);
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
      return acc;
    };
    return f;
  }

  static ScalarFunction constant(cplx c) { return polynomial({c}); }

  static ScalarFunction from_callable(std::function<cplx(double)> fn) {
    ScalarFunction f;
    f.evaluate = std::move(fn);
    return f;
  }
};

struct FunctionQuadruple {
  ScalarFunction f1, f2, f3, f4;
};

/// T(x) = f1 + f2 + x(f3 + f4), D(x) = (1 − x)(f1 f2 − x f3 f4), F(x) = f1 f2 − x f3 f4.
struct CalculusProfile {
  ScalarFunction T, D, F;
  std::optional<cplx> c;  // value of T when T is constant on the sample grid
};

inline CalculusProfile calculus_profile(const FunctionQuadruple& f, const Tolerances& tol = {}) {
  CalculusProfile p;
  p.T = ScalarFunction::from_callable([f](double x) { return f.f1(x) + f.f2(x) + x * (f.f3(x) + f.f4(x)); });
  p.F = ScalarFunction::from_callable([f](double x) { return f.f1(x) * f.f2(x) - x * f.f3(x) * f.f4(x); });
  p.D = ScalarFunction::from_callable(
      [f](double x) { return (1.0 - x) * (f.f1(x) * f.f2(x) - x * f.f3(x) * f.f4(x)); });
  const cplx t0 = p.T(0.0);
  bool constant = true;
  for (int k = 1; k <= 1000 && constant; ++k) constant = std::abs(p.T(k / 1000.0) - t0) <= tol.eig_tol;
  if (constant) p.c = t0;
  return p;
}

/// 2x2 block of b on span(u_i, w_i) for the generic eigenvalue x.
inline Eigen::Matrix2cd generic_block(const FunctionQuadruple& f, double x) {
  const double s = std::sqrt(std::max(0.0, x * (1.0 - x)));
  const cplx f1 = f.f1(x), f2 = f.f2(x), f3 = f.f3(x), f4 = f.f4(x);
  Eigen::Matrix2cd b;
  b << f1 + x * (f2 + f3 + f4), s * (f2 + f3), s * (f2 + f4), (1.0 - x) * f2;
  return b;
}

/// b = P1 f1(P1P2P1) + P2 f2(P2P1P2) + P1P2 f3(P2P1P2) + P2P1 f4(P1P2P1), assembled
/// on the canonical components of the pair.
inline CMatrix build_b(const PairDecomposition& pair, const FunctionQuadruple& f) {
  const Index d = pair.ambient_dim();
  CMatrix b = CMatrix::Zero(d, d);
  b += (f.f1(1.0) + f.f2(1.0) + f.f3(1.0) + f.f4(1.0)) * pair.both.projector();
  b += f.f1(0.0) * pair.first_only.projector();
  b += f.f2(0.0) * pair.second_only.projector();
  for (Index i = 0; i < pair.generic_dim(); ++i) {
    // Use the stored cosine/sine so that the block matches P2 exactly.
    const double x = pair.a(i);
    const double c = pair.cosines(i), s = pair.sines(i);
    const cplx f1 = f.f1(x), f2 = f.f2(x), f3 = f.f3(x), f4 = f.f4(x);
    Eigen::Matrix2cd blk;
    blk << f1 + x * (f2 + f3 + f4), c * s * (f2 + f3), c * s * (f2 + f4), s * s * f2;
    CMatrix frame(d, 2);
    frame << pair.k_first.col(i), pair.k_second.col(i);
    b += frame * blk * frame.adjoint();
  }
  return b;
}

inline std::pair<cplx, cplx> quadratic_roots(cplx t, cplx dd) {
  const cplx disc = std::sqrt(t * t - 4.0 * dd);
  return {(t + disc) * 0.5, (t - disc) * 0.5};
}

/// Eigenvalues of b with multiplicity, read off the canonical form.
inline std::vector<cplx> spectrum_of_b(const PairDecomposition& pair, const FunctionQuadruple& f) {
  std::vector<cplx> out;
  const cplx top = f.f1(1.0) + f.f2(1.0) + f.f3(1.0) + f.f4(1.0);
  for (Index i = 0; i < pair.both.dim(); ++i) out.push_back(top);
  for (Index i = 0; i < pair.first_only.dim(); ++i) out.push_back(f.f1(0.0));
  for (Index i = 0; i < pair.second_only.dim(); ++i) out.push_back(f.f2(0.0));
  for (Index i = 0; i < pair.neither.dim(); ++i) out.push_back(cplx(0.0, 0.0));
  for (Index i = 0; i < pair.generic_dim(); ++i) {
    const double x = pair.a(i);
    const cplx f1 = f.f1(x), f2 = f.f2(x), f3 = f.f3(x), f4 = f.f4(x);
    const cplx t = f1 + f2 + x * (f3 + f4);
    const cplx dd = (1.0 - x) * (f1 * f2 - x * f3 * f4);
    const auto [l1, l2] = quadratic_roots(t, dd);
    out.push_back(l1);
    out.push_back(l2);
  }
  return out;
}

/// Greedy minimal-distance matching of two multisets; returns the largest matched
/// distance, or +inf when the sizes differ.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return kInfinity;
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  // Pair globally closest elements first.
  struct Cand {
    double dist;
    std::size_t i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) cands.push_back({std::abs(a[i] - b[j]), i, j});
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });
  std::vector<bool> used_a(a.size(), false);
  std::size_t matched = 0;
  for (const auto& c : cands) {
    if (used_a[c.i] || used[c.j]) continue;
    used_a[c.i] = used[c.j] = true;
    worst = std::max(worst, c.dist);
    if (++matched == a.size()) break;
  }
  return worst;
}

/// Punctured-disk, invertibility and closed-range margins for b.
/// Requires F(x) ≠ 0 on a 1001-point grid of [0, 1) together with σ(a).
inline MarginReport calculus_criteria(const PairDecomposition& pair, const FunctionQuadruple& f,
                                      const Tolerances& tol = {}) {
  const CalculusProfile prof = calculus_profile(f, tol);
  std::vector<double> grid;
  for (int k = 0; k < 1000; ++k) grid.push_back(k / 1000.0);
  for (Index i = 0; i < pair.generic_dim(); ++i) grid.push_back(pair.a(i));
  for (double x : grid) {
    if (std::abs(prof.F(x)) <= tol.margin_tol) {
      throw Error(ErrorKind::HypothesisViolated, "F vanishes at x = " + std::to_string(x));
    }
  }

  const std::vector<cplx> spec = spectrum_of_b(pair, f);
  const CMatrix b = build_b(pair, f);
  const double scale = std::max(1.0, op_norm(b));

  double punctured = kInfinity;
  double smallest = kInfinity;
  for (const cplx& l : spec) {
    smallest = std::min(smallest, std::abs(l));
    if (std::abs(l) > tol.eig_tol * scale) punctured = std::min(punctured, std::abs(l));
  }

  MarginReport r;
  r.add("punctured_disk", punctured, tol);
  r.add("invertibility", smallest, tol);
  r.add("closed_range", smallest_nonzero_singular_value(b, tol), tol);
  const cplx top = f.f1(1.0) + f.f2(1.0) + f.f3(1.0) + f.f4(1.0);
  r.flags["sum_at_one_nonzero"] = std::abs(top) > tol.margin_tol;
  r.flags["trace_constant"] = prof.c.has_value();
  if (prof.c) {
    r.values["c_re"] = prof.c->real();
    r.values["c_im"] = prof.c->imag();
  }
  return r;
}

}  // namespace closedsum
