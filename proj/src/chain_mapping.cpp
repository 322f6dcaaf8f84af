#include "kerrcav/chain_mapping.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kerrcav::chain {

ChainCoefficients build_chain(const model::SystemParams& params, int n_sites) {
  params.validate();
  if (n_sites < 2)
    throw std::invalid_argument("build_chain: n_sites must be >= 2");

  ChainCoefficients out;
  out.eta_sys = std::sqrt(params.gamma * params.cutoff / std::numbers::pi);
  out.site_freqs.assign(static_cast<size_t>(n_sites - 1), 0.0);
  out.hoppings.resize(static_cast<size_t>(n_sites - 2));
  for (int n = 0; n < n_sites - 2; ++n) {
    const double num = static_cast<double>(n + 1);
    const double den = std::sqrt(static_cast<double>(2 * n + 1) *
                                 static_cast<double>(2 * n + 3));
    out.hoppings[static_cast<size_t>(n)] = params.cutoff * num / den;
  }
  out.recurrence_time = static_cast<double>(n_sites) / params.cutoff;
  return out;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] via the symmetric Jacobi matrix
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  nodes.resize(static_cast<size_t>(n));
  weights.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    nodes[static_cast<size_t>(k)] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    weights[static_cast<size_t>(k)] = 2.0 * v0 * v0;
  }
}

// Legendre P_0..P_nmax at x by the three-term recurrence
void legendre_all(int n_max, double x, std::vector<double>& p) {
  p.resize(static_cast<size_t>(n_max + 1));
  p[0] = 1.0;
  if (n_max >= 1) p[1] = x;
  for (int n = 1; n < n_max; ++n)
    p[static_cast<size_t>(n + 1)] =
        ((2.0 * n + 1.0) * x * p[static_cast<size_t>(n)] -
         n * p[static_cast<size_t>(n - 1)]) /
        (n + 1.0);
}

} // namespace

double verify_legendre_orthonormality(int n_max, int quad_points,
                                      double x_max) {
  if (n_max < 0)
    throw std::invalid_argument(
        "verify_legendre_orthonormality: n_max must be >= 0");
  if (!(x_max > 0.0))
    throw std::invalid_argument(
        "verify_legendre_orthonormality: x_max must be > 0");
  if (quad_points < n_max + 1)
    throw std::invalid_argument(
        "verify_legendre_orthonormality: " + std::to_string(quad_points) +
        " quadrature points cannot resolve products of order " +
        std::to_string(n_max) + " (need at least n_max + 1)");

  std::vector<double> nodes, weights;
  gauss_legendre(quad_points, nodes, weights);

  const int d = n_max + 1;
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> p;
  for (int k = 0; k < quad_points; ++k) {
    // substitute x = x_max * u; the scaled measure dx folds into the
    // normalization sqrt((2n+1)/(2 x_max)) * sqrt(x_max du)
    legendre_all(n_max, nodes[static_cast<size_t>(k)], p);
    for (int n = 0; n < d; ++n) {
      const double un = std::sqrt((2.0 * n + 1.0) / 2.0) * p[static_cast<size_t>(n)];
      for (int m = n; m < d; ++m) {
        const double um =
            std::sqrt((2.0 * m + 1.0) / 2.0) * p[static_cast<size_t>(m)];
        overlap(n, m) += weights[static_cast<size_t>(k)] * un * um;
      }
    }
  }
  double max_dev = 0.0;
  for (int n = 0; n < d; ++n)
    for (int m = n; m < d; ++m) {
      const double target = (n == m) ? 1.0 : 0.0;
      max_dev = std::max(max_dev, std::abs(overlap(n, m) - target));
    }
  return max_dev;
}

} // namespace kerrcav::chain
