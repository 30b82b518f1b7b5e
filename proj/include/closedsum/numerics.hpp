#pragma once

// Dense complex linear algebra kernel shared by every other header.
//
// All routines are thin, pure wrappers over Eigen. Hermitian inputs are
// symmetrized before decomposition; singular values and eigenvalues are never
// snapped, only compared against a Tolerances policy by the callers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace closedsum {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ErrorKind {
  NonSquare,
  NotHermitian,
  ComputationFailed,
  EigenvalueOnBoundary,
  DimensionMismatch,
  HypothesisViolated,
  GraphDisconnected,
  NotIndependent,
  SumNotFull,
  IndexOutOfRange,
  GapTooSmall,
  RangeNotIncluded,
  NormTooLarge,
  NotNonnegative,
  BudgetExceeded,
  NotInvertible,
  DiagonalNotPositive,
  RangeConditionViolated,
  UnknownFamily,
  InvalidArgument,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::ComputationFailed: return "ComputationFailed";
    case ErrorKind::EigenvalueOnBoundary: return "EigenvalueOnBoundary";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::GraphDisconnected: return "GraphDisconnected";
    case ErrorKind::NotIndependent: return "NotIndependent";
    case ErrorKind::SumNotFull: return "SumNotFull";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::GapTooSmall: return "GapTooSmall";
    case ErrorKind::RangeNotIncluded: return "RangeNotIncluded";
    case ErrorKind::NormTooLarge: return "NormTooLarge";
    case ErrorKind::NotNonnegative: return "NotNonnegative";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::DiagonalNotPositive: return "DiagonalNotPositive";
    case ErrorKind::RangeConditionViolated: return "RangeConditionViolated";
    case ErrorKind::UnknownFamily: return "UnknownFamily";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every precondition failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Numerical policy consumed by all operations.
///
/// rank_tol is relative to the largest singular value; eig_tol bounds
/// reconstruction and symmetry residuals; margin_tol is the decision
/// threshold used when turning a margin into a verdict.
struct Tolerances {
  double rank_tol = 1e-10;
  double eig_tol = 1e-10;
  double margin_tol = 1e-8;

  void validate(Index max_dim = 1) const {
    if (!(rank_tol > 0.0) || !(eig_tol > 0.0) || !(margin_tol > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must be strictly positive");
    }
    const double floor = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<Index>(1, max_dim));
    if (rank_tol < floor) {
      throw Error(ErrorKind::InvalidArgument, "rank_tol below machine precision for this dimension");
    }
  }
};

struct HermitianSpectrum {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, unitary
};

struct SvdResult {
  CMatrix u;
  RVector singular_values;  // descending
  CMatrix v;
  Index rank = 0;
};

/// Half-open real interval [lower, upper).
struct Interval {
  double lower;
  double upper;
};

inline CMatrix identity(Index d) { return CMatrix::Identity(d, d); }

inline bool all_finite(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

inline RVector singular_values(const CMatrix& m) {
  if (m.size() == 0) return RVector();
  Eigen::JacobiSVD<CMatrix> solver(m);
  return solver.singularValues();
}

/// Spectral norm; zero for empty matrices.
inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

inline CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

inline double asymmetry(const CMatrix& m) { return op_norm(m - m.adjoint()); }

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::NonSquare, std::string(what) + " must be square, got " + std::to_string(m.rows()) +
                                          "x" + std::to_string(m.cols()));
  }
}

inline HermitianSpectrum eig_hermitian(const CMatrix& m, const Tolerances& tol = {}) {
  require_square(m, "eig_hermitian input");
  if (m.rows() == 0) return {RVector(), CMatrix(0, 0)};
  const double scale = std::max(1.0, op_norm(m));
  if (asymmetry(m) > tol.eig_tol * scale) {
    throw Error(ErrorKind::NotHermitian, "asymmetry exceeds eig_tol");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ComputationFailed, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RVector eigvals_hermitian(const CMatrix& m, const Tolerances& tol = {}) {
  return eig_hermitian(m, tol).eigenvalues;
}

/// Numerical rank counts σ_i > rank_tol·max(σ_1, scale). The default scale 0 gives the
/// purely relative rule; callers whose input has a known natural size (for example a
/// difference of orthonormal frames) pass it so that round-off residue reads as rank 0.
inline SvdResult svd(const CMatrix& m, const Tolerances& tol = {}, double scale = 0.0) {
  SvdResult out;
  if (m.rows() == 0 || m.cols() == 0) {
    out.u = identity(m.rows());
    out.v = identity(m.cols());
    out.singular_values = RVector();
    return out;
  }
  Eigen::JacobiSVD<CMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = solver.matrixU();
  out.v = solver.matrixV();
  out.singular_values = solver.singularValues();
  if (!all_finite(out.u) || !all_finite(out.v)) {
    throw Error(ErrorKind::ComputationFailed, "SVD produced non-finite factors");
  }
  const double top = std::max(out.singular_values(0), scale);
  for (Index i = 0; i < out.singular_values.size(); ++i) {
    if (top > 0.0 && out.singular_values(i) > tol.rank_tol * top) ++out.rank;
  }
  return out;
}

inline CMatrix pinv(const CMatrix& m, const Tolerances& tol = {}) {
  const SvdResult s = svd(m, tol);
  CMatrix out = CMatrix::Zero(m.cols(), m.rows());
  for (Index i = 0; i < s.rank; ++i) {
    out += s.v.col(i) * (1.0 / s.singular_values(i)) * s.u.col(i).adjoint();
  }
  return out;
}

/// Orthonormal basis of the column space (numerical rank per rank_tol).
inline CMatrix column_space(const CMatrix& m, const Tolerances& tol = {}, double scale = 0.0) {
  const SvdResult s = svd(m, tol, scale);
  return s.u.leftCols(s.rank);
}

/// Orthonormal basis of the kernel.
inline CMatrix null_space(const CMatrix& m, const Tolerances& tol = {}, double scale = 0.0) {
  const SvdResult s = svd(m, tol, scale);
  return s.v.rightCols(m.cols() - s.rank);
}

/// Smallest singular value above the rank cutoff; +inf for a numerically zero matrix.
inline double smallest_nonzero_singular_value(const CMatrix& m, const Tolerances& tol = {}, double scale = 0.0) {
  const SvdResult s = svd(m, tol, scale);
  if (s.rank == 0) return kInfinity;
  return s.singular_values(s.rank - 1);
}

/// Smallest singular value counting all min(rows, cols) of them (zero included).
inline double smallest_singular_value(const CMatrix& m) {
  if (m.cols() == 0) return kInfinity;
  if (m.rows() < m.cols()) return 0.0;
  const RVector sv = singular_values(m);
  return sv(sv.size() - 1);
}

/// Orthoprojector onto the eigenvectors whose eigenvalue lies in [lower, upper).
inline CMatrix spectral_projector(const CMatrix& m, Interval interval, const Tolerances& tol = {}) {
  const HermitianSpectrum spec = eig_hermitian(m, tol);
  const double guard = tol.eig_tol * std::max(1.0, op_norm(m));
  CMatrix p = CMatrix::Zero(m.rows(), m.cols());
  for (Index i = 0; i < spec.eigenvalues.size(); ++i) {
    const double lambda = spec.eigenvalues(i);
    if (std::abs(lambda - interval.lower) <= guard || std::abs(lambda - interval.upper) <= guard) {
      throw Error(ErrorKind::EigenvalueOnBoundary,
                  "eigenvalue " + std::to_string(lambda) + " is within eig_tol of an interval endpoint");
    }
    if (lambda >= interval.lower && lambda < interval.upper) {
      p += spec.eigenvectors.col(i) * spec.eigenvectors.col(i).adjoint();
    }
  }
  return p;
}

/// f(M) for Hermitian M by applying f to the eigenvalues.
inline CMatrix apply_hermitian(const CMatrix& m, const std::function<cplx(double)>& f, const Tolerances& tol = {}) {
  const HermitianSpectrum spec = eig_hermitian(m, tol);
  CMatrix out = CMatrix::Zero(m.rows(), m.cols());
  for (Index i = 0; i < spec.eigenvalues.size(); ++i) {
    out += f(spec.eigenvalues(i)) * spec.eigenvectors.col(i) * spec.eigenvectors.col(i).adjoint();
  }
  return out;
}

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues are clamped.
inline CMatrix sqrt_psd(const CMatrix& m, const Tolerances& tol = {}) {
  return apply_hermitian(m, [](double x) { return cplx(std::sqrt(std::max(0.0, x)), 0.0); }, tol);
}

/// Inverse power M^{-p} of a positive definite matrix.
inline CMatrix inverse_power_pd(const CMatrix& m, double p, const Tolerances& tol = {}) {
  return apply_hermitian(m, [p](double x) { return cplx(std::pow(x, -p), 0.0); }, tol);
}

inline std::vector<cplx> eigenvalues_general(const CMatrix& m) {
  require_square(m, "eigenvalues_general input");
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ComputationFailed, "complex eigensolver did not converge");
  }
  std::vector<cplx> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  return out;
}

inline double projector_defect(const CMatrix& p) { return std::max(op_norm(p * p - p), op_norm(p - p.adjoint())); }

}  // namespace closedsum
