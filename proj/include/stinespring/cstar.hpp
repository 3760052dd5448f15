#pragma once

#include "stinespring/numerics.hpp"
#include "stinespring/types.hpp"

#include <utility>
#include <vector>

namespace stinespring {

/// The full matrix algebra A = M_n(C).
struct MatrixAlgebra {
  int n = 1;
};

/// A linear map phi: M_n(C) -> B(H1), stored by its images on the matrix
/// units E_pq (index p*n + q). Completely positive maps are the ones whose
/// derived Choi matrix is positive semidefinite.
struct CPMap {
  MatrixAlgebra algebra;
  int h1_dim = 1;
  std::vector<CMatrix> images;  // n^2 matrices of size h1_dim x h1_dim

  const CMatrix& image(int p, int q) const { return images[p * algebra.n + q]; }
};

/// Kraus form phi(a) = sum_s K_s a K_s^*; each operator maps C^n -> H1.
struct KrausSet {
  std::vector<CMatrix> operators;  // h1_dim x n each

  int rank() const { return static_cast<int>(operators.size()); }
};

/// The matrix units {E_pq} of M_n(C), index p*n + q.
inline std::vector<CMatrix> matrix_units(const MatrixAlgebra& algebra) {
  const int n = algebra.n;
  std::vector<CMatrix> units;
  units.reserve(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      CMatrix unit = CMatrix::Zero(n, n);
      unit(p, q) = 1.0;
      units.push_back(std::move(unit));
    }
  }
  return units;
}

/// Choi matrix C = sum_pq E_pq (x) phi(E_pq): the block matrix whose (p,q)
/// block is phi(E_pq). Size n*h1_dim.
inline CMatrix choi_of(const CPMap& phi) {
  const int n = phi.algebra.n;
  const int h1 = phi.h1_dim;
  CMatrix choi = CMatrix::Zero(static_cast<Eigen::Index>(n) * h1,
                               static_cast<Eigen::Index>(n) * h1);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      choi.block(p * h1, q * h1, h1, h1) = phi.image(p, q);
    }
  }
  return choi;
}

/// Recover the map from its Choi matrix (inverse of choi_of).
inline CPMap cp_map_from_choi(const CMatrix& choi, int n, int h1_dim) {
  CPMap phi{MatrixAlgebra{n}, h1_dim, {}};
  phi.images.reserve(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      phi.images.push_back(choi.block(p * h1_dim, q * h1_dim, h1_dim, h1_dim));
    }
  }
  return phi;
}

struct CpVerdict {
  bool completely_positive = false;
  double min_eigenvalue = 0.0;
  RVector choi_eigenvalues;      // ascending
  double hermiticity_residual = 0.0;
};

/// Complete positivity via the Choi criterion: the map is CP iff its Choi
/// matrix is Hermitian and lambda_min >= -psd_rtol * max(1, lambda_max).
inline CpVerdict is_completely_positive(const CPMap& phi, const TolerancePolicy& tol = {}) {
  const CMatrix choi = choi_of(phi);
  CpVerdict verdict;
  verdict.hermiticity_residual = operator_norm(choi - choi.adjoint());
  const CMatrix herm = 0.5 * (choi + choi.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
  verdict.choi_eigenvalues = solver.eigenvalues();
  const Eigen::Index dim = verdict.choi_eigenvalues.size();
  verdict.min_eigenvalue = dim > 0 ? verdict.choi_eigenvalues(0) : 0.0;
  const double lambda_max = dim > 0 ? verdict.choi_eigenvalues(dim - 1) : 0.0;
  const bool hermitian =
      verdict.hermiticity_residual <= tol.atol * std::max(1.0, operator_norm(choi));
  verdict.completely_positive =
      hermitian && verdict.min_eigenvalue >= -tol.psd_rtol * std::max(1.0, lambda_max);
  return verdict;
}

/// Choi rank: eigenvalues above rank_rtol * lambda_max.
inline int choi_rank(const CPMap& phi, const TolerancePolicy& tol = {}) {
  const RVector eig = is_completely_positive(phi, tol).choi_eigenvalues;
  if (eig.size() == 0) return 0;
  const double lambda_max = std::abs(eig(eig.size() - 1));
  int rank = 0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig(i) > tol.rank_rtol * lambda_max) ++rank;
  }
  return rank;
}

/// Kraus decomposition from the Choi eigensystem: eigenvectors with
/// eigenvalue above the rank cutoff, scaled by sqrt(lambda) and reshaped to
/// h1_dim x n. The operators are linearly independent and r equals the
/// numerical Choi rank.
inline KrausSet kraus_decomposition(const CPMap& phi, const TolerancePolicy& tol = {}) {
  const CpVerdict verdict = is_completely_positive(phi, tol);
  if (!verdict.completely_positive) {
    throw Error(ErrorCode::NotCompletelyPositive,
                "kraus_decomposition: min Choi eigenvalue " +
                    std::to_string(verdict.min_eigenvalue));
  }
  const int n = phi.algebra.n;
  const int h1 = phi.h1_dim;
  const HermitianEig eig = hermitian_eig(choi_of(phi), tol);
  const Eigen::Index dim = eig.eigenvalues.size();
  const double lambda_max = dim > 0 ? std::abs(eig.eigenvalues(dim - 1)) : 0.0;

  KrausSet kraus;
  for (Eigen::Index s = 0; s < dim; ++s) {
    const double lambda = eig.eigenvalues(s);
    if (lambda <= tol.rank_rtol * lambda_max) continue;
    const double weight = std::sqrt(lambda);
    CMatrix op(h1, n);
    for (int p = 0; p < n; ++p) {
      for (int i = 0; i < h1; ++i) {
        op(i, p) = weight * eig.eigenvectors(p * h1 + i, s);
      }
    }
    kraus.operators.push_back(std::move(op));
  }
  return kraus;
}

/// Assemble phi(a) = sum_s K_s a K_s^* as a CPMap on matrix units.
inline CPMap cp_map_from_kraus(int n, int h1_dim, const std::vector<CMatrix>& operators) {
  CPMap phi{MatrixAlgebra{n}, h1_dim, {}};
  phi.images.reserve(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      CMatrix image = CMatrix::Zero(h1_dim, h1_dim);
      for (const CMatrix& op : operators) {
        image += op.col(p) * op.col(q).adjoint();
      }
      phi.images.push_back(std::move(image));
    }
  }
  return phi;
}

/// Schur multiplier map phi(a) = D o a (entrywise product), stored on matrix
/// units as phi(E_pq) = D_pq E_pq. CP exactly when D is PSD.
inline CPMap schur_map(const CMatrix& d) {
  if (d.rows() != d.cols()) {
    throw Error(ErrorCode::NonSquare, "schur_map: D is " + std::to_string(d.rows()) + "x" +
                                          std::to_string(d.cols()));
  }
  const int n = static_cast<int>(d.rows());
  CPMap phi{MatrixAlgebra{n}, n, {}};
  phi.images.reserve(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      CMatrix image = CMatrix::Zero(n, n);
      image(p, q) = d(p, q);
      phi.images.push_back(std::move(image));
    }
  }
  return phi;
}

/// Linear extension from matrix units: phi(a) = sum_pq a_pq phi(E_pq).
inline CMatrix apply_cp(const CPMap& phi, const CMatrix& a) {
  const int n = phi.algebra.n;
  if (a.rows() != n || a.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, "apply_cp: element is " + std::to_string(a.rows()) +
                                              "x" + std::to_string(a.cols()) + ", algebra is M_" +
                                              std::to_string(n));
  }
  CMatrix result = CMatrix::Zero(phi.h1_dim, phi.h1_dim);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const Complex coeff = a(p, q);
      if (coeff != 0.0) result += coeff * phi.image(p, q);
    }
  }
  return result;
}

/// phi(1) = I within atol.
inline bool is_unital(const CPMap& phi, const TolerancePolicy& tol = {}) {
  const CMatrix one = CMatrix::Identity(phi.algebra.n, phi.algebra.n);
  const CMatrix image = apply_cp(phi, one);
  return operator_norm(image - CMatrix::Identity(phi.h1_dim, phi.h1_dim)) <= tol.atol;
}

}  // namespace stinespring
