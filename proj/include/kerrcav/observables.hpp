#pragma once

// Diagnostics computed from a truncated Fock-basis density matrix: mean
// field, second-order coherence, fidelity to the closest classical (coherent)
// state, moment-matched Gaussian reference, and relative-entropy
// non-Gaussianity.

#include <Eigen/Dense>
#include <complex>

namespace kerrcav::obs {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;

struct FockDensityMatrix {
  MatrixXcd mat;

  int dim() const { return static_cast<int>(mat.rows()); }

  // density-matrix axioms: Hermitian (1e-10), unit trace (1e-8),
  // eigenvalues >= -1e-9; throws std::runtime_error naming the violation
  void validate() const;
};

// Tr[a rho]
cxd mean_field(const FockDensityMatrix& rho);

// Tr[a^dag a rho]
double occupation(const FockDensityMatrix& rho);

// Tr[(a^dag)^2 a^2 rho]
double pair_occupation(const FockDensityMatrix& rho);

// g2(0) = Tr[a^dag a^dag a a rho] / Tr[a^dag a rho]^2; requires occupation
// > 1e-12, otherwise throws (undefined for an empty mode)
double g2_zero(const FockDensityMatrix& rho);

// F = <alpha_cl| rho |alpha_cl> with alpha_cl = mean_field(rho); the
// coherent proxy is truncated and renormalized at the matrix dimension
double fidelity_to_classical(const FockDensityMatrix& rho);

struct GaussianMoments {
  cxd mean;       // <a>
  double n_mean;  // <a^dag a>
  cxd anomalous;  // <a a>

  // quadrature covariance in the convention x=(a+a^dag)/sqrt(2),
  // p=(a-a^dag)/(i sqrt(2)); vacuum = identity/2
  double sigma_xx() const;
  double sigma_pp() const;
  double sigma_xp() const;
  // symplectic eigenvalue nu = 2*sqrt(det sigma); Heisenberg bound nu >= 1
  double symplectic_nu() const;
};

// first and second moments of rho; throws when the implied symplectic
// eigenvalue falls below 1 - 1e-6 (truncation artifact)
GaussianMoments closest_gaussian_moments(const FockDensityMatrix& rho);

// delta = S(rho_G) - S(rho) in nats, where rho_G is the Gaussian state with
// the same first and second moments; eigenvalues of rho within -1e-9 of zero
// are clamped before the entropy
double non_gaussianity(const FockDensityMatrix& rho);

// von Neumann entropy of rho in nats (0 log 0 = 0)
double von_neumann_entropy(const FockDensityMatrix& rho);

} // namespace kerrcav::obs
