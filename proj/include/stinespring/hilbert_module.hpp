#pragma once

#include "stinespring/cstar.hpp"
#include "stinespring/numerics.hpp"
#include "stinespring/types.hpp"

#include <cmath>
#include <vector>

namespace stinespring {

/// The free Hilbert C*-module E = A^k over A = M_n(C), with inner product
/// <x,y> = sum_i x_i^* y_i (conjugate-linear in the first variable).
struct FreeModule {
  MatrixAlgebra algebra;
  int k = 1;

  /// Number of scalar basis elements delta_i (x) E_pq.
  int basis_size() const { return k * algebra.n * algebra.n; }
};

/// x = (x_1, ..., x_k) with each component in M_n(C).
struct ModuleElement {
  std::vector<CMatrix> components;
};

namespace detail {

inline void require_same_module(const ModuleElement& x, const ModuleElement& y,
                                const char* where) {
  if (x.components.size() != y.components.size()) {
    throw Error(ErrorCode::ModuleMismatch,
                std::string(where) + ": elements have " + std::to_string(x.components.size()) +
                    " and " + std::to_string(y.components.size()) + " components");
  }
  for (std::size_t i = 0; i < x.components.size(); ++i) {
    if (x.components[i].rows() != y.components[i].rows() ||
        x.components[i].cols() != y.components[i].cols()) {
      throw Error(ErrorCode::ModuleMismatch,
                  std::string(where) + ": component " + std::to_string(i) + " shape mismatch");
    }
  }
}

}  // namespace detail

/// <x,y> = sum_i x_i^* y_i.
inline CMatrix inner_product(const ModuleElement& x, const ModuleElement& y) {
  detail::require_same_module(x, y, "inner_product");
  if (x.components.empty()) return CMatrix();
  CMatrix result = CMatrix::Zero(x.components[0].cols(), y.components[0].cols());
  for (std::size_t i = 0; i < x.components.size(); ++i) {
    result += x.components[i].adjoint() * y.components[i];
  }
  return result;
}

/// Right action x . a = (x_1 a, ..., x_k a).
inline ModuleElement module_action(const ModuleElement& x, const CMatrix& a) {
  if (a.rows() != a.cols() ||
      (!x.components.empty() && x.components[0].cols() != a.rows())) {
    throw Error(ErrorCode::ShapeMismatch,
                "module_action: acting element is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
  }
  ModuleElement result;
  result.components.reserve(x.components.size());
  for (const CMatrix& component : x.components) {
    result.components.push_back(component * a);
  }
  return result;
}

/// ||x|| = ||<x,x>||^{1/2}.
inline double module_norm(const ModuleElement& x) {
  if (x.components.empty()) return 0.0;
  return std::sqrt(operator_norm(inner_product(x, x)));
}

/// The scalar basis element x_b = delta_i (x) E_pq, with b = (i*n + p)*n + q.
inline ModuleElement scalar_basis_element(const FreeModule& module, int b) {
  const int n = module.algebra.n;
  const int i = b / (n * n);
  const int p = (b / n) % n;
  const int q = b % n;
  ModuleElement x;
  x.components.assign(module.k, CMatrix::Zero(n, n));
  x.components[i](p, q) = 1.0;
  return x;
}

/// A phi-map Phi: E -> B(H1,H2) stored by its images on the scalar basis of
/// E (index (i*n + p)*n + q, matching scalar_basis_element). The defining
/// identity Phi(x)^* Phi(y) = phi(<x,y>) is checked by verify_phi_map; a map
/// stored this way is linear by construction, so the basis check extends to
/// all of E.
struct PhiMap {
  FreeModule module;
  CPMap phi;
  int h2_dim = 1;
  std::vector<CMatrix> basis_images;  // k*n^2 matrices of size h2_dim x h1_dim

  const CMatrix& basis_image(int b) const { return basis_images[static_cast<std::size_t>(b)]; }
};

/// Linear extension from the scalar basis.
inline CMatrix apply_phi(const PhiMap& Phi, const ModuleElement& x) {
  const int n = Phi.module.algebra.n;
  if (static_cast<int>(x.components.size()) != Phi.module.k) {
    throw Error(ErrorCode::ModuleMismatch,
                "apply_phi: element has " + std::to_string(x.components.size()) +
                    " components, module rank is " + std::to_string(Phi.module.k));
  }
  CMatrix result = CMatrix::Zero(Phi.h2_dim, Phi.phi.h1_dim);
  for (int i = 0; i < Phi.module.k; ++i) {
    const CMatrix& component = x.components[i];
    if (component.rows() != n || component.cols() != n) {
      throw Error(ErrorCode::ModuleMismatch, "apply_phi: component " + std::to_string(i) +
                                                 " is not " + std::to_string(n) + "x" +
                                                 std::to_string(n));
    }
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        const Complex coeff = component(p, q);
        if (coeff != 0.0) result += coeff * Phi.basis_image((i * n + p) * n + q);
      }
    }
  }
  return result;
}

struct PhiMapCheck {
  bool verdict = false;
  double max_residual = 0.0;
  double scale = 1.0;
};

/// Exhaustive check of Phi(x_b)^* Phi(x_c) = phi(<x_b,x_c>) over all scalar
/// basis pairs; by sesquilinearity this covers all of E. The verdict
/// threshold is atol scaled by the magnitudes of phi and Phi.
inline PhiMapCheck verify_phi_map(const PhiMap& Phi, const TolerancePolicy& tol = {}) {
  const int basis = Phi.module.basis_size();
  PhiMapCheck check;
  double phi_norm = 0.0;
  for (const CMatrix& image : Phi.phi.images) phi_norm = std::max(phi_norm, operator_norm(image));
  double Phi_norm = 0.0;
  for (const CMatrix& image : Phi.basis_images) Phi_norm = std::max(Phi_norm, operator_norm(image));
  check.scale = std::max({1.0, phi_norm, Phi_norm * Phi_norm});

  for (int b = 0; b < basis; ++b) {
    const ModuleElement xb = scalar_basis_element(Phi.module, b);
    for (int c = 0; c < basis; ++c) {
      const ModuleElement xc = scalar_basis_element(Phi.module, c);
      const CMatrix lhs = Phi.basis_image(b).adjoint() * Phi.basis_image(c);
      const CMatrix rhs = apply_cp(Phi.phi, inner_product(xb, xc));
      check.max_residual = std::max(check.max_residual, operator_norm(lhs - rhs));
    }
  }
  check.verdict = check.max_residual <= tol.atol * check.scale;
  return check;
}

}  // namespace stinespring
