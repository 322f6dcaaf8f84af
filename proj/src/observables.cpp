#include "kerrcav/observables.hpp"

#include "kerrcav/fock.hpp"
#include "kerrcav/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kerrcav::obs {

void FockDensityMatrix::validate() const {
  if (mat.rows() != mat.cols() || mat.rows() < 1)
    throw std::runtime_error("density matrix: not square");
  const double herm = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10)
    throw std::runtime_error("density matrix: Hermiticity violated by " +
                             std::to_string(herm));
  const double tr_err = std::abs(mat.trace() - cxd(1.0, 0.0));
  if (tr_err > 1e-8)
    throw std::runtime_error("density matrix: trace deviates from 1 by " +
                             std::to_string(tr_err));
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (mat + mat.adjoint()),
                                              Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-9)
    throw std::runtime_error("density matrix: eigenvalue " +
                             std::to_string(min_eig) + " below -1e-9");
}

cxd mean_field(const FockDensityMatrix& rho) {
  // Tr[a rho] = sum_n sqrt(n+1) rho_{n+1,n}
  cxd acc(0.0, 0.0);
  const int m = rho.dim();
  for (int n = 0; n + 1 < m; ++n)
    acc += std::sqrt(static_cast<double>(n + 1)) * rho.mat(n + 1, n);
  return acc;
}

double occupation(const FockDensityMatrix& rho) {
  double acc = 0.0;
  for (int n = 0; n < rho.dim(); ++n)
    acc += static_cast<double>(n) * rho.mat(n, n).real();
  return acc;
}

double pair_occupation(const FockDensityMatrix& rho) {
  double acc = 0.0;
  for (int n = 0; n < rho.dim(); ++n)
    acc += static_cast<double>(n) * static_cast<double>(n - 1) *
           rho.mat(n, n).real();
  return acc;
}

double g2_zero(const FockDensityMatrix& rho) {
  const double n = occupation(rho);
  if (n <= 1e-12)
    throw std::runtime_error(
        "g2_zero: occupation " + std::to_string(n) +
        " below 1e-12; second-order coherence is undefined for an empty mode");
  return pair_occupation(rho) / (n * n);
}

double fidelity_to_classical(const FockDensityMatrix& rho) {
  const cxd alpha = mean_field(rho);
  const Eigen::VectorXcd proxy = fock::coherent_vector(alpha, rho.dim());
  const cxd f = proxy.dot(rho.mat * proxy); // dot() conjugates the left side
  return f.real();
}

double GaussianMoments::sigma_xx() const {
  const cxd da2 = anomalous - mean * mean;
  const double nf = n_mean - std::norm(mean);
  return da2.real() + nf + 0.5;
}

double GaussianMoments::sigma_pp() const {
  const cxd da2 = anomalous - mean * mean;
  const double nf = n_mean - std::norm(mean);
  return -da2.real() + nf + 0.5;
}

double GaussianMoments::sigma_xp() const {
  const cxd da2 = anomalous - mean * mean;
  return da2.imag();
}

double GaussianMoments::symplectic_nu() const {
  const double det =
      sigma_xx() * sigma_pp() - sigma_xp() * sigma_xp();
  return 2.0 * std::sqrt(std::max(det, 0.0));
}

GaussianMoments closest_gaussian_moments(const FockDensityMatrix& rho) {
  GaussianMoments g;
  g.mean = mean_field(rho);
  g.n_mean = occupation(rho);
  // Tr[a a rho] = sum_n sqrt((n+1)(n+2)) rho_{n+2,n}
  cxd a2(0.0, 0.0);
  const int m = rho.dim();
  for (int n = 0; n + 2 < m; ++n)
    a2 += std::sqrt(static_cast<double>(n + 1) * static_cast<double>(n + 2)) *
          rho.mat(n + 2, n);
  g.anomalous = a2;
  const double nu = g.symplectic_nu();
  if (nu < 1.0 - 1e-6)
    throw std::runtime_error(
        "closest_gaussian_moments: symplectic eigenvalue " +
        std::to_string(nu) +
        " below the Heisenberg bound; increase the Fock truncation");
  return g;
}

double von_neumann_entropy(const FockDensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho.mat + rho.mat.adjoint()),
                                              Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < rho.dim(); ++k) {
    double p = es.eigenvalues()(k);
    if (p < -1e-6)
      throw std::runtime_error(
          "von_neumann_entropy: eigenvalue " + std::to_string(p) +
          " too negative to be truncation noise");
    if (p <= 0.0) continue; // clamp the -1e-9..0 band to zero
    s -= p * std::log(p);
  }
  return s;
}

double non_gaussianity(const FockDensityMatrix& rho) {
  const GaussianMoments g = closest_gaussian_moments(rho);
  const double nu = std::max(g.symplectic_nu(), 1.0);
  const double np = (nu + 1.0) / 2.0; // thermal occupancy + 1 of the reference
  const double nm = (nu - 1.0) / 2.0;
  const double s_gauss =
      np * std::log(np) - ((nm > 0.0) ? nm * std::log(nm) : 0.0);
  return s_gauss - von_neumann_entropy(rho);
}

} // namespace kerrcav::obs
