#pragma once

#include "stinespring/cstar.hpp"
#include "stinespring/dilation.hpp"
#include "stinespring/hilbert_module.hpp"

#include <Eigen/QR>

#include <cstdint>
#include <random>

namespace stinespring {

namespace detail {

inline CMatrix random_complex_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

/// Thin Q factor of a Gaussian draw: a Haar-ish random isometry C^cols -> C^rows.
inline CMatrix random_isometry(std::mt19937_64& rng, int rows, int cols) {
  const CMatrix g = random_complex_matrix(rng, rows, cols);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(rows, cols);
}

}  // namespace detail

/// Seeded random CP map with Choi rank exactly r: draws r complex Gaussian
/// Kraus operators and assembles phi(a) = sum_s K_s a K_s^*. Degenerate
/// draws (numerical Choi rank below r, a probability-zero event) are
/// redrawn from the same stream, so the result is a pure function of
/// (n, h1_dim, r, seed).
inline CPMap gen_cp_map(int n, int h1_dim, int r, std::uint64_t seed,
                        const TolerancePolicy& tol = {}) {
  if (n < 1 || h1_dim < 1 || r < 1 || r > n * h1_dim) {
    throw Error(ErrorCode::InvalidRank,
                "gen_cp_map: need 1 <= r <= n*h1_dim, got r = " + std::to_string(r) +
                    " with n*h1_dim = " + std::to_string(n * h1_dim));
  }
  std::mt19937_64 rng(seed);
  while (true) {
    std::vector<CMatrix> kraus;
    kraus.reserve(static_cast<std::size_t>(r));
    for (int s = 0; s < r; ++s) kraus.push_back(detail::random_complex_matrix(rng, h1_dim, n));
    CPMap phi = cp_map_from_kraus(n, h1_dim, kraus);
    if (choi_rank(phi, tol) == r) return phi;
  }
}

/// Seeded random phi-map over E = A^k into B(H1, H2). Mirrors the dilation
/// construction: take the minimal (rho, V, K1) of phi, stack k copies of K1,
/// let Psi0(x) = sum_i T_i rho(x_i) (so Psi0(x)^* Psi0(y) = rho(<x,y>)), draw
/// a seeded isometry J: K1^k -> H2, and set Phi(x) = J Psi0(x) V. Then
/// Phi(x)^* Phi(y) = V^* rho(<x,y>) V = phi(<x,y>) holds by construction.
inline PhiMap gen_phi_map(const CPMap& phi, int k, int h2_dim, std::uint64_t seed,
                          const TolerancePolicy& tol = {}) {
  if (k < 1) {
    throw Error(ErrorCode::InvalidRank, "gen_phi_map: module rank k must be positive");
  }
  const int n = phi.algebra.n;
  const StinespringRep rep = minimal_stinespring(phi, tol);
  const int k1 = rep.k1_dim;
  if (h2_dim < k1 * k) {
    throw Error(ErrorCode::DimensionTooSmall,
                "gen_phi_map: need h2_dim >= n*r*k = " + std::to_string(k1 * k) + ", got " +
                    std::to_string(h2_dim));
  }
  std::mt19937_64 rng(seed);
  const CMatrix isometry = detail::random_isometry(rng, h2_dim, k1 * k);

  PhiMap Phi;
  Phi.module = FreeModule{phi.algebra, k};
  Phi.phi = phi;
  Phi.h2_dim = h2_dim;
  Phi.basis_images.reserve(static_cast<std::size_t>(k) * n * n);
  for (int i = 0; i < k; ++i) {
    const CMatrix block = isometry.middleCols(i * k1, k1);  // J T_i
    for (int u = 0; u < n * n; ++u) {
      Phi.basis_images.push_back(block * rep.rho_images[u] * rep.V);
    }
  }
  return Phi;
}

}  // namespace stinespring
