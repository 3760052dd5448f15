#pragma once

#include "stinespring/dilation.hpp"
#include "stinespring/generators.hpp"
#include "stinespring/hilbert_module.hpp"

#include <cmath>
#include <ostream>

namespace stinespring::demo {

/// The built-in demo instance: A = M_2(C), H1 = C^2, H2 = C^8, E = A + A,
/// phi the Schur multiplier by D = [[1, 1/2], [1/2, 1]], and Phi the phi-map
///
///   Phi(a + b) = [ c*a ; c*b ; (1/2) a J ; (1/2) b J ],  c = sqrt(3)/2,
///
/// with J = diag(1, -1), stacked as four 2x2 row blocks.

inline CPMap cp_map() {
  CMatrix d(2, 2);
  d << 1.0, 0.5, 0.5, 1.0;
  return schur_map(d);
}

inline PhiMap phi_map() {
  const double c = std::sqrt(3.0) / 2.0;
  CMatrix j = CMatrix::Identity(2, 2);
  j(1, 1) = -1.0;

  PhiMap Phi;
  Phi.module = FreeModule{MatrixAlgebra{2}, 2};
  Phi.phi = cp_map();
  Phi.h2_dim = 8;
  const std::vector<CMatrix> units = matrix_units(Phi.module.algebra);
  for (int i = 0; i < 2; ++i) {
    for (const CMatrix& unit : units) {
      CMatrix image = CMatrix::Zero(8, 2);
      image.block(4 * i, 0, 2, 2) = c * unit;
      image.block(4 * i + 4, 0, 2, 2) = 0.5 * unit * j;
      Phi.basis_images.push_back(std::move(image));
    }
  }
  return Phi;
}

/// The explicit minimal pair for the demo instance: K1 = C^4 with
/// rho(a) = diag(a, a), V = [c I ; (1/2) J], K2 = H2 = C^8 with
/// Psi(a + b) = [[a,0],[b,0],[0,a],[0,b]] and W = I_8.
inline RepresentationPair explicit_pair() {
  const double c = std::sqrt(3.0) / 2.0;

  RepresentationPair pair;
  pair.stinespring.k1_dim = 4;
  const CMatrix eye2 = CMatrix::Identity(2, 2);
  const std::vector<CMatrix> units = matrix_units(MatrixAlgebra{2});
  for (const CMatrix& unit : units) {
    pair.stinespring.rho_images.push_back(kron(eye2, unit));
  }
  pair.stinespring.V = CMatrix::Zero(4, 2);
  pair.stinespring.V(0, 0) = c;
  pair.stinespring.V(1, 1) = c;
  pair.stinespring.V(2, 0) = 0.5;
  pair.stinespring.V(3, 1) = -0.5;

  pair.module_rep.k2_dim = 8;
  pair.module_rep.W = CMatrix::Identity(8, 8);
  for (int i = 0; i < 2; ++i) {
    for (const CMatrix& unit : units) {
      CMatrix psi = CMatrix::Zero(8, 4);
      psi.block(2 * i, 0, 2, 2) = unit;      // row blocks [a,0],[b,0]
      psi.block(4 + 2 * i, 2, 2, 2) = unit;  // row blocks [0,a],[0,b]
      pair.module_rep.psi_images.push_back(std::move(psi));
    }
  }
  return pair;
}

struct DemoResult {
  bool cp_and_phi_map = false;
  bool constructed_dims = false;
  bool explicit_pair_verifies = false;
  bool equivalence = false;
  bool asadi_impossible = false;

  bool all_pass() const {
    return cp_and_phi_map && constructed_dims && explicit_pair_verifies && equivalence &&
           asadi_impossible;
  }
};

/// End-to-end walkthrough of the demo instance, one pass/fail line per
/// stage. Exercises: the CP certificate with its exact Choi spectrum
/// {0, 0, 1/2, 3/2}, the phi-map certificate, construction of the minimal
/// pair (dimensions 4 and 8), verification of the explicit pair above,
/// unitary equivalence between the explicit and constructed pairs, and the
/// impossibility of Phi(x0) Phi(x0)^* = I on rank grounds.
inline DemoResult run_demo(std::ostream& out) {
  const TolerancePolicy tol;
  const CPMap phi = cp_map();
  const PhiMap Phi = phi_map();
  DemoResult result;

  const auto line = [&out](bool ok, const std::string& text) {
    out << (ok ? "[PASS] " : "[FAIL] ") << text << "\n";
  };

  const CpVerdict cp = is_completely_positive(phi, tol);
  const double eig_err =
      cp.choi_eigenvalues.size() == 4
          ? std::max({std::abs(cp.choi_eigenvalues(0)), std::abs(cp.choi_eigenvalues(1)),
                      std::abs(cp.choi_eigenvalues(2) - 0.5),
                      std::abs(cp.choi_eigenvalues(3) - 1.5)})
          : 1.0;
  const PhiMapCheck phi_check = verify_phi_map(Phi, tol);
  result.cp_and_phi_map =
      cp.completely_positive && eig_err <= 1e-12 && phi_check.verdict &&
      phi_check.max_residual <= 1e-12;
  line(result.cp_and_phi_map,
       "phi completely positive (Choi spectrum {0, 0, 1/2, 3/2}) and Phi a phi-map "
       "(residual " +
           std::to_string(phi_check.max_residual) + ")");

  const StinespringRep constructed = minimal_stinespring(phi, tol);
  const ModuleRep induced = induce_module_rep(Phi, constructed, tol);
  const RepresentationPair constructed_pair{constructed, induced};
  const RepresentationReport constructed_report =
      verify_representation(phi, Phi, constructed_pair, tol);
  result.constructed_dims =
      constructed.k1_dim == 4 && induced.k2_dim == 8 && constructed_report.verdict;
  line(result.constructed_dims, "constructed minimal dilation has K1 = C^4, K2 = C^8 = H2");

  const RepresentationPair reference = explicit_pair();
  const RepresentationReport reference_report = verify_representation(phi, Phi, reference, tol);
  result.explicit_pair_verifies = reference_report.max_residual() <= 1e-12;
  line(result.explicit_pair_verifies,
       "explicit pair verifies: phi(a) = V* rho(a) V, Phi(x) = W* Psi(x) V (max residual " +
           std::to_string(reference_report.max_residual()) + ")");

  const double v_norm = operator_norm(reference.stinespring.V);
  const double phi_one = operator_norm(apply_cp(phi, CMatrix::Identity(2, 2)));
  out << "       ||V||^2 = " << v_norm * v_norm << ", ||phi(1)|| = " << phi_one << "\n";

  bool equivalent = false;
  double witness_residual = 1.0;
  try {
    const EquivalenceWitness witness = unitary_equivalence(reference, constructed_pair, tol);
    witness_residual = witness.max_residual();
    equivalent = witness_residual <= 1e-8;
  } catch (const Error&) {
    equivalent = false;
  }
  result.equivalence = equivalent;
  line(result.equivalence, "explicit and constructed pairs unitarily equivalent (residual " +
                               std::to_string(witness_residual) + ")");

  const AsadiCheck asadi = asadi_condition_check(Phi);
  result.asadi_impossible =
      asadi.possibility == AsadiPossibility::Impossible && asadi.max_rank_bound == 2;
  line(result.asadi_impossible,
       "x0 condition impossible: rank(Phi(x0) Phi(x0)*) <= " +
           std::to_string(asadi.max_rank_bound) + " < 8 = dim H2");

  return result;
}

}  // namespace stinespring::demo
