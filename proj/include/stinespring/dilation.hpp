#pragma once

#include "stinespring/cstar.hpp"
#include "stinespring/hilbert_module.hpp"
#include "stinespring/numerics.hpp"
#include "stinespring/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace stinespring {

/// Minimal Stinespring triple (rho, V, K1): rho is a unital *-homomorphism
/// M_n(C) -> B(K1), V: H1 -> K1, and phi(a) = V^* rho(a) V.
struct StinespringRep {
  int k1_dim = 0;
  std::vector<CMatrix> rho_images;  // n^2 matrices of size k1_dim x k1_dim
  CMatrix V;                        // k1_dim x h1_dim

  const CMatrix& rho(int p, int q, int n) const { return rho_images[p * n + q]; }
};

/// Module triple (Psi, W, K2): Psi is a rho-morphism E -> B(K1,K2) stored on
/// the scalar basis, W: H2 -> K2, and Phi(x) = W^* Psi(x) V.
struct ModuleRep {
  int k2_dim = 0;
  std::vector<CMatrix> psi_images;  // k*n^2 matrices of size k2_dim x k1_dim
  CMatrix W;                        // k2_dim x h2_dim
};

struct RepresentationPair {
  StinespringRep stinespring;
  ModuleRep module_rep;
};

namespace detail {

/// Columns {rho(E_pq) V f_beta}, the concrete form of rho(A)VH1. Column
/// index (p*n + q)*h1 + beta.
inline CMatrix spanning_columns(const StinespringRep& rep) {
  const Eigen::Index h1 = rep.V.cols();
  const Eigen::Index units = static_cast<Eigen::Index>(rep.rho_images.size());
  CMatrix columns(rep.k1_dim, units * h1);
  for (Eigen::Index u = 0; u < units; ++u) {
    columns.middleCols(u * h1, h1) = rep.rho_images[u] * rep.V;
  }
  return columns;
}

/// Columns {Psi(x_b) V f_beta}, the concrete form of Psi(E)VH1.
inline CMatrix module_spanning_columns(const RepresentationPair& pair) {
  const Eigen::Index h1 = pair.stinespring.V.cols();
  const Eigen::Index basis = static_cast<Eigen::Index>(pair.module_rep.psi_images.size());
  CMatrix columns(pair.module_rep.k2_dim, basis * h1);
  for (Eigen::Index b = 0; b < basis; ++b) {
    columns.middleCols(b * h1, h1) = pair.module_rep.psi_images[b] * pair.stinespring.V;
  }
  return columns;
}

inline double rep_scale(const StinespringRep& rep) {
  const double v2 = operator_norm(rep.V);
  return std::max(1.0, v2 * v2);
}

}  // namespace detail

/// Minimal Stinespring representation via the Kraus route: K1 = C^n (x) C^r,
/// rho(a) = a (x) I_r, and (V h) = sum_s (K_s^* h) (x) e_s for the Kraus
/// operators K_s of phi. Minimality K1 = [rho(A)VH1] holds because the K_s
/// are linearly independent.
inline StinespringRep minimal_stinespring(const CPMap& phi, const TolerancePolicy& tol = {}) {
  const CpVerdict verdict = is_completely_positive(phi, tol);
  if (!verdict.completely_positive) {
    throw Error(ErrorCode::NotCompletelyPositive,
                "minimal_stinespring: min Choi eigenvalue " +
                    std::to_string(verdict.min_eigenvalue));
  }
  const int n = phi.algebra.n;
  const int h1 = phi.h1_dim;
  const KrausSet kraus = kraus_decomposition(phi, tol);
  const int r = kraus.rank();
  const int k1 = n * r;

  StinespringRep rep;
  rep.k1_dim = k1;
  rep.rho_images.reserve(static_cast<std::size_t>(n) * n);
  const CMatrix eye_r = CMatrix::Identity(r, r);
  for (const CMatrix& unit : matrix_units(phi.algebra)) {
    rep.rho_images.push_back(kron(unit, eye_r));
  }
  rep.V = CMatrix::Zero(k1, h1);
  for (int p = 0; p < n; ++p) {
    for (int s = 0; s < r; ++s) {
      rep.V.row(p * r + s) = kraus.operators[s].col(p).adjoint();
    }
  }
  return rep;
}

/// Minimal Stinespring representation via the Gram (GNS-style) route:
/// equip A (x) H1 with <a (x) h, b (x) g> = <h, phi(a^* b) g>, realize the
/// quotient by the Gram kernel through the eigendecomposition of the Gram
/// matrix, and push left multiplication and 1 (x) h through the quotient.
/// Serves as an independent construction against the Kraus route; the two
/// must agree up to unitary equivalence.
inline StinespringRep minimal_stinespring_gram(const CPMap& phi, const TolerancePolicy& tol = {}) {
  const CpVerdict verdict = is_completely_positive(phi, tol);
  if (!verdict.completely_positive) {
    throw Error(ErrorCode::NotCompletelyPositive,
                "minimal_stinespring_gram: min Choi eigenvalue " +
                    std::to_string(verdict.min_eigenvalue));
  }
  const int n = phi.algebra.n;
  const int h1 = phi.h1_dim;
  const int dim = n * n * h1;  // basis E_pq (x) f_beta, index (p*n + q)*h1 + beta

  CMatrix gram = CMatrix::Zero(dim, dim);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      for (int s = 0; s < n; ++s) {
        // <E_pq (x) f, E_ps (x) g> = <f, phi(E_qp E_ps) g> = phi(E_qs)[f,g]
        gram.block(((p * n + q) * h1), ((p * n + s) * h1), h1, h1) = phi.image(q, s);
      }
    }
  }

  const HermitianEig eig = hermitian_eig(gram, tol);
  const double lambda_max = std::max(std::abs(eig.eigenvalues(dim - 1)), 0.0);
  int first_kept = dim;
  for (int i = 0; i < dim; ++i) {
    if (eig.eigenvalues(i) > tol.rank_rtol * lambda_max) {
      first_kept = i;
      break;
    }
  }
  const int k1 = dim - first_kept;
  if (k1 > 0 && first_kept > 0 && lambda_max > 0.0) {
    const double gap =
        (eig.eigenvalues(first_kept) - eig.eigenvalues(first_kept - 1)) / lambda_max;
    if (gap < tol.rank_rtol) {
      throw Error(ErrorCode::IllConditioned,
                  "minimal_stinespring_gram: spectral gap " + std::to_string(gap) +
                      " at the rank cutoff is below rank_rtol");
    }
  }

  // Isometric coordinates of the quotient: u -> Lambda^{1/2} Q^* u.
  const CMatrix q_kept = eig.eigenvectors.rightCols(k1);
  RVector lambda = eig.eigenvalues.tail(k1);
  const CMatrix to_coords =
      lambda.cwiseSqrt().asDiagonal() * CMatrix(q_kept.adjoint());            // k1 x dim
  const CMatrix from_coords = q_kept * lambda.cwiseSqrt().cwiseInverse().asDiagonal();  // dim x k1

  StinespringRep rep;
  rep.k1_dim = k1;
  rep.rho_images.reserve(static_cast<std::size_t>(n) * n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      // Left multiplication E_uv . (E_rs (x) f) = delta_vr E_us (x) f.
      CMatrix rows = CMatrix::Zero(dim, k1);
      for (int s = 0; s < n; ++s) {
        rows.middleRows((u * n + s) * h1, h1) = from_coords.middleRows((v * n + s) * h1, h1);
      }
      rep.rho_images.push_back(to_coords * rows);
    }
  }
  CMatrix unit_embedding = CMatrix::Zero(dim, h1);  // f -> 1 (x) f = sum_p E_pp (x) f
  for (int p = 0; p < n; ++p) {
    unit_embedding.block((p * n + p) * h1, 0, h1, h1) = CMatrix::Identity(h1, h1);
  }
  rep.V = to_coords * unit_embedding;
  return rep;
}

/// Step II: K2 = [Phi(E)H1] as an orthonormal range, W the projection onto
/// it, and Psi(x) the least-squares realization of
/// Psi(x)(sum rho(a_j) V h_j) = sum Phi(x a_j) h_j on the spanning family.
/// The solve residual certifies well-definedness; it stays at numerical
/// noise for genuine phi-maps and blows up otherwise.
inline ModuleRep induce_module_rep(const PhiMap& Phi, const StinespringRep& rep,
                                   const TolerancePolicy& tol = {}) {
  const int n = Phi.module.algebra.n;
  const int h1 = Phi.phi.h1_dim;
  const int basis = Phi.module.basis_size();
  if (rep.V.cols() != h1 || static_cast<int>(rep.rho_images.size()) != n * n) {
    throw Error(ErrorCode::ShapeMismatch, "induce_module_rep: representation does not match phi");
  }

  const CMatrix spanning = detail::spanning_columns(rep);
  const RangeBasis spanning_range = orthonormal_range(spanning, tol);
  if (spanning_range.rank < rep.k1_dim) {
    throw Error(ErrorCode::NotMinimal,
                "induce_module_rep: rho(A)VH1 spans " + std::to_string(spanning_range.rank) +
                    " of " + std::to_string(rep.k1_dim) + " dimensions");
  }

  CMatrix phi_columns(Phi.h2_dim, static_cast<Eigen::Index>(basis) * h1);
  for (int b = 0; b < basis; ++b) {
    phi_columns.middleCols(static_cast<Eigen::Index>(b) * h1, h1) = Phi.basis_image(b);
  }
  const RangeBasis range = orthonormal_range(phi_columns, tol);
  const int k2 = range.rank;

  ModuleRep module_rep;
  module_rep.k2_dim = k2;
  module_rep.W = range.basis.adjoint();  // K2 in coordinates; W^* is the inclusion

  double Phi_norm = 0.0;
  for (const CMatrix& image : Phi.basis_images) Phi_norm = std::max(Phi_norm, operator_norm(image));
  const double scale = std::max({1.0, detail::rep_scale(rep), Phi_norm});

  const std::vector<CMatrix> units = matrix_units(Phi.module.algebra);
  module_rep.psi_images.reserve(static_cast<std::size_t>(basis));
  for (int b = 0; b < basis; ++b) {
    const ModuleElement xb = scalar_basis_element(Phi.module, b);
    CMatrix target(k2, static_cast<Eigen::Index>(n) * n * h1);
    for (int u = 0; u < n * n; ++u) {
      target.middleCols(static_cast<Eigen::Index>(u) * h1, h1) =
          module_rep.W * apply_phi(Phi, module_action(xb, units[u]));
    }
    LeastSquares solve = pseudo_solve(spanning, target, tol);
    if (solve.residual > tol.atol * scale) {
      throw Error(ErrorCode::NotAPhiMap,
                  "induce_module_rep: well-definedness residual " +
                      std::to_string(solve.residual) + " for basis element " + std::to_string(b));
    }
    module_rep.psi_images.push_back(std::move(solve.solution));
  }
  return module_rep;
}

/// Residuals of every representation identity; verification reports, never
/// throws (on consistent shapes).
struct RepresentationReport {
  double rho_multiplicative = 0.0;   // rho(E_pq) rho(E_rs) = delta_qr rho(E_ps)
  double rho_adjoint = 0.0;          // rho(E_pq)^* = rho(E_qp)
  double rho_unital = 0.0;           // sum_p rho(E_pp) = I
  double phi_reconstruction = 0.0;   // V^* rho(a) V = phi(a)
  double psi_morphism = 0.0;         // Psi(x)^* Psi(y) = rho(<x,y>)
  double module_reconstruction = 0.0;  // W^* Psi(x) V = Phi(x)
  double norm_identity = 0.0;        // | ||V||^2 - ||phi(1)|| |
  double scale = 1.0;
  bool verdict = false;

  double max_residual() const {
    return std::max({rho_multiplicative, rho_adjoint, rho_unital, phi_reconstruction,
                     psi_morphism, module_reconstruction, norm_identity});
  }
};

inline RepresentationReport verify_representation(const CPMap& phi, const PhiMap& Phi,
                                                  const RepresentationPair& pair,
                                                  const TolerancePolicy& tol = {}) {
  const int n = phi.algebra.n;
  const int h1 = phi.h1_dim;
  const int basis = Phi.module.basis_size();
  const StinespringRep& st = pair.stinespring;
  const ModuleRep& mod = pair.module_rep;
  if (static_cast<int>(st.rho_images.size()) != n * n || st.V.cols() != h1 ||
      static_cast<int>(mod.psi_images.size()) != basis || mod.W.cols() != Phi.h2_dim) {
    throw Error(ErrorCode::ShapeMismatch, "verify_representation: pair does not match (phi, Phi)");
  }

  RepresentationReport report;
  const CMatrix eye_k1 = CMatrix::Identity(st.k1_dim, st.k1_dim);

  CMatrix unit_sum = CMatrix::Zero(st.k1_dim, st.k1_dim);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const CMatrix& rho_pq = st.rho(p, q, n);
      report.rho_adjoint =
          std::max(report.rho_adjoint, operator_norm(rho_pq.adjoint() - st.rho(q, p, n)));
      report.phi_reconstruction =
          std::max(report.phi_reconstruction,
                   operator_norm(st.V.adjoint() * rho_pq * st.V - phi.image(p, q)));
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          const CMatrix product = rho_pq * st.rho(r, s, n);
          const CMatrix expected = (q == r) ? st.rho(p, s, n) : CMatrix::Zero(st.k1_dim, st.k1_dim);
          report.rho_multiplicative =
              std::max(report.rho_multiplicative, operator_norm(product - expected));
        }
      }
      if (p == q) unit_sum += rho_pq;
    }
  }
  report.rho_unital = operator_norm(unit_sum - eye_k1);

  for (int b = 0; b < basis; ++b) {
    const ModuleElement xb = scalar_basis_element(Phi.module, b);
    report.module_reconstruction =
        std::max(report.module_reconstruction,
                 operator_norm(mod.W.adjoint() * mod.psi_images[b] * st.V - Phi.basis_image(b)));
    for (int c = 0; c < basis; ++c) {
      const ModuleElement xc = scalar_basis_element(Phi.module, c);
      const CMatrix rho_inner = [&] {
        const CMatrix inner = inner_product(xb, xc);
        CMatrix acc = CMatrix::Zero(st.k1_dim, st.k1_dim);
        for (int p = 0; p < n; ++p) {
          for (int q = 0; q < n; ++q) {
            if (inner(p, q) != 0.0) acc += inner(p, q) * st.rho(p, q, n);
          }
        }
        return acc;
      }();
      report.psi_morphism =
          std::max(report.psi_morphism,
                   operator_norm(mod.psi_images[b].adjoint() * mod.psi_images[c] - rho_inner));
    }
  }

  const double v_norm = operator_norm(st.V);
  const double phi_one = operator_norm(apply_cp(phi, CMatrix::Identity(n, n)));
  report.norm_identity = std::abs(v_norm * v_norm - phi_one);

  double Phi_norm = 0.0;
  for (const CMatrix& image : Phi.basis_images) Phi_norm = std::max(Phi_norm, operator_norm(image));
  double phi_norm = 0.0;
  for (const CMatrix& image : phi.images) phi_norm = std::max(phi_norm, operator_norm(image));
  report.scale = std::max({1.0, v_norm * v_norm, phi_norm, Phi_norm});
  report.verdict = report.max_residual() <= tol.atol * report.scale;
  return report;
}

struct MinimalityCheck {
  bool minimal_k1 = false;  // K1 = [rho(A)VH1]
  bool minimal_k2 = false;  // K2 = [Psi(E)VH1]
};

inline MinimalityCheck minimality_check(const RepresentationPair& pair,
                                        const TolerancePolicy& tol = {}) {
  MinimalityCheck check;
  check.minimal_k1 =
      orthonormal_range(detail::spanning_columns(pair.stinespring), tol).rank ==
      pair.stinespring.k1_dim;
  check.minimal_k2 =
      orthonormal_range(detail::module_spanning_columns(pair), tol).rank ==
      pair.module_rep.k2_dim;
  return check;
}

/// Unitaries U1: K1 -> K1', U2: K2 -> K2' intertwining two minimal
/// representations of the same (phi, Phi), with the certification residuals
/// of every identity they must satisfy.
struct EquivalenceWitness {
  CMatrix U1;  // k1' x k1
  CMatrix U2;  // k2' x k2
  double u1_unitarity = 0.0;
  double u2_unitarity = 0.0;
  double intertwines_v = 0.0;    // U1 V = V'
  double intertwines_rho = 0.0;  // U1 rho(a) = rho'(a) U1
  double intertwines_w = 0.0;    // U2 W = W'
  double intertwines_psi = 0.0;  // U2 Psi(x) = Psi'(x) U1
  double scale = 1.0;

  double max_residual() const {
    return std::max({u1_unitarity, u2_unitarity, intertwines_v, intertwines_rho, intertwines_w,
                     intertwines_psi});
  }
};

/// Synthesize the intertwining unitaries by solving U1 (rho(E_pq)V f) =
/// rho'(E_pq)V' f and U2 (Psi(x_b)V f) = Psi'(x_b)V' f in the least-squares
/// sense, then certify unitarity and all intertwining identities. Throws
/// NotMinimal when either pair fails the span condition and NotEquivalent
/// when any certificate exceeds tolerance.
inline EquivalenceWitness unitary_equivalence(const RepresentationPair& pair_a,
                                              const RepresentationPair& pair_b,
                                              const TolerancePolicy& tol = {}) {
  if (pair_a.stinespring.rho_images.size() != pair_b.stinespring.rho_images.size() ||
      pair_a.stinespring.V.cols() != pair_b.stinespring.V.cols() ||
      pair_a.module_rep.psi_images.size() != pair_b.module_rep.psi_images.size() ||
      pair_a.module_rep.W.cols() != pair_b.module_rep.W.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "unitary_equivalence: pairs live over different spaces");
  }
  const MinimalityCheck min_a = minimality_check(pair_a, tol);
  const MinimalityCheck min_b = minimality_check(pair_b, tol);
  if (!min_a.minimal_k1 || !min_a.minimal_k2) {
    throw Error(ErrorCode::NotMinimal, "unitary_equivalence: first representation is not minimal");
  }
  if (!min_b.minimal_k1 || !min_b.minimal_k2) {
    throw Error(ErrorCode::NotMinimal, "unitary_equivalence: second representation is not minimal");
  }

  EquivalenceWitness witness;
  witness.U1 = pseudo_solve(detail::spanning_columns(pair_a.stinespring),
                            detail::spanning_columns(pair_b.stinespring), tol)
                   .solution;
  witness.U2 = pseudo_solve(detail::module_spanning_columns(pair_a),
                            detail::module_spanning_columns(pair_b), tol)
                   .solution;

  const auto unitarity = [](const CMatrix& u) {
    const CMatrix eye_cols = CMatrix::Identity(u.cols(), u.cols());
    const CMatrix eye_rows = CMatrix::Identity(u.rows(), u.rows());
    return std::max(operator_norm(u.adjoint() * u - eye_cols),
                    operator_norm(u * u.adjoint() - eye_rows));
  };
  witness.u1_unitarity = unitarity(witness.U1);
  witness.u2_unitarity = unitarity(witness.U2);
  witness.intertwines_v = operator_norm(witness.U1 * pair_a.stinespring.V - pair_b.stinespring.V);
  for (std::size_t u = 0; u < pair_a.stinespring.rho_images.size(); ++u) {
    witness.intertwines_rho =
        std::max(witness.intertwines_rho,
                 operator_norm(witness.U1 * pair_a.stinespring.rho_images[u] -
                               pair_b.stinespring.rho_images[u] * witness.U1));
  }
  witness.intertwines_w =
      operator_norm(witness.U2 * pair_a.module_rep.W - pair_b.module_rep.W);
  for (std::size_t b = 0; b < pair_a.module_rep.psi_images.size(); ++b) {
    witness.intertwines_psi =
        std::max(witness.intertwines_psi,
                 operator_norm(witness.U2 * pair_a.module_rep.psi_images[b] -
                               pair_b.module_rep.psi_images[b] * witness.U1));
  }
  witness.scale =
      std::max({1.0, detail::rep_scale(pair_a.stinespring), detail::rep_scale(pair_b.stinespring)});

  if (witness.max_residual() > tol.atol * witness.scale) {
    throw Error(ErrorCode::NotEquivalent,
                "unitary_equivalence: certification residual " +
                    std::to_string(witness.max_residual()) +
                    " exceeds tolerance; the pairs do not represent the same (phi, Phi)");
  }
  return witness;
}

enum class AsadiPossibility { Impossible, Inconclusive };

struct AsadiCheck {
  AsadiPossibility possibility = AsadiPossibility::Inconclusive;
  int max_rank_bound = 0;
};

/// Whether some x0 with Phi(x0) Phi(x0)^* = I_{H2} can exist. Phi(x0) maps
/// H1 -> H2, so the product has rank at most min(h1, h2); when h2 > h1 the
/// identity on H2 is out of reach. No search is attempted otherwise.
inline AsadiCheck asadi_condition_check(const PhiMap& Phi) {
  AsadiCheck check;
  check.max_rank_bound = std::min(Phi.phi.h1_dim, Phi.h2_dim);
  check.possibility = Phi.h2_dim > Phi.phi.h1_dim ? AsadiPossibility::Impossible
                                                  : AsadiPossibility::Inconclusive;
  return check;
}

}  // namespace stinespring
