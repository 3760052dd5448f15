#pragma once

#include "stinespring/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <utility>

namespace stinespring {

/// Largest singular value; 0 for an empty matrix.
inline double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

struct HermitianEig {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // orthonormal columns, aligned with eigenvalues
};

/// Eigendecomposition of a Hermitian matrix. The input must be Hermitian up
/// to atol * max(1, ||M||); the decomposition is computed on the Hermitian
/// part (M + M*)/2.
inline HermitianEig hermitian_eig(const CMatrix& m, const TolerancePolicy& tol = {}) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NonSquare,
                "hermitian_eig: matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
  const double scale = std::max(1.0, operator_norm(m));
  const double asym = operator_norm(m - m.adjoint());
  if (asym > tol.atol * scale) {
    throw Error(ErrorCode::NotHermitian,
                "hermitian_eig: ||M - M*|| = " + std::to_string(asym) +
                    " exceeds " + std::to_string(tol.atol * scale));
  }
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

struct RangeBasis {
  CMatrix basis;  // orthonormal columns spanning the numerical column space
  int rank = 0;
  RVector singular_values;  // descending
};

/// Orthonormal basis of the numerical column space. Rank counts singular
/// values above rank_rtol * sigma_max; an all-zero (or empty) input yields
/// rank 0 and an empty basis.
inline RangeBasis orthonormal_range(const CMatrix& columns, const TolerancePolicy& tol = {}) {
  if (columns.rows() == 0 || columns.cols() == 0) {
    return {CMatrix(columns.rows(), 0), 0, RVector()};
  }
  Eigen::JacobiSVD<CMatrix> svd(columns, Eigen::ComputeThinU);
  const RVector& sv = svd.singularValues();
  const double smax = sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > tol.rank_rtol * smax) ++rank;
  return {svd.matrixU().leftCols(rank), rank, sv};
}

struct LeastSquares {
  CMatrix solution;  // minimal Frobenius norm minimizer of ||X S - T||_F
  double residual = 0.0;
};

/// Minimal-norm least-squares solution of X * S = T (both sides act on the
/// same column family). The residual doubles as a consistency certificate:
/// it vanishes exactly when T's columns depend on S's the way a single
/// linear operator allows.
inline LeastSquares pseudo_solve(const CMatrix& s, const CMatrix& t,
                                 const TolerancePolicy& tol = {}) {
  if (s.cols() != t.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                "pseudo_solve: S has " + std::to_string(s.cols()) + " columns, T has " +
                    std::to_string(t.cols()));
  }
  if (s.size() == 0) {
    CMatrix x = CMatrix::Zero(t.rows(), s.rows());
    return {x, t.norm()};
  }
  Eigen::JacobiSVD<CMatrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const double smax = sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > tol.rank_rtol * smax) ++rank;
  // X = T * S^+ with S^+ truncated at the rank cutoff.
  CMatrix x = (t * svd.matrixV().leftCols(rank)) *
              sv.head(rank).cwiseInverse().asDiagonal() *
              svd.matrixU().leftCols(rank).adjoint();
  const double residual = (x * s - t).norm();
  return {x, residual};
}

/// Kronecker product with lexicographic (left-factor-major) index flattening:
/// (A (x) B)[(i,k),(j,l)] = A[i,j] * B[k,l].
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace stinespring
