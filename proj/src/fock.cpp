#include "kerrcav/fock.hpp"

#include "kerrcav/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace kerrcav::fock {

MatrixXcd annihilation(int m) {
  if (m < 1) throw std::invalid_argument("annihilation: dimension must be >= 1");
  MatrixXcd a = MatrixXcd::Zero(m, m);
  for (int n = 1; n < m; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

MatrixXcd number_operator(int m) {
  MatrixXcd n = MatrixXcd::Zero(m, m);
  for (int k = 0; k < m; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

MatrixXcd parity_operator(int m) {
  MatrixXcd p = MatrixXcd::Zero(m, m);
  for (int k = 0; k < m; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

VectorXcd fock_vector(int n, int m) {
  if (n < 0 || n >= m)
    throw std::invalid_argument("fock_vector: n out of range");
  VectorXcd v = VectorXcd::Zero(m);
  v(n) = 1.0;
  return v;
}

VectorXcd coherent_vector(cxd alpha, int m, double* loss) {
  // log-scaled Poisson amplitudes to stay finite at large |alpha|
  VectorXcd v(m);
  const double a2 = std::norm(alpha);
  const double la = (a2 > 0.0) ? std::log(std::abs(alpha)) : 0.0;
  const double ph = std::arg(alpha);
  double log_fact = 0.0;
  for (int n = 0; n < m; ++n) {
    if (n > 0) log_fact += 0.5 * std::log(static_cast<double>(n));
    const double mag = (a2 > 0.0 || n == 0)
                           ? std::exp(-0.5 * a2 + n * la - log_fact)
                           : 0.0;
    v(n) = std::polar(mag, ph * n);
  }
  const double kept = v.squaredNorm();
  if (loss) *loss = std::max(0.0, 1.0 - kept);
  if (kept <= 0.0)
    throw std::runtime_error("coherent_vector: truncation lost the full state");
  v /= std::sqrt(kept);
  return v;
}

MatrixXcd thermal_density_matrix(double nbar, int m) {
  if (nbar < 0.0)
    throw std::invalid_argument("thermal_density_matrix: nbar must be >= 0");
  MatrixXcd rho = MatrixXcd::Zero(m, m);
  if (nbar == 0.0) {
    rho(0, 0) = 1.0;
    return rho;
  }
  const double ratio = nbar / (nbar + 1.0);
  double w = 1.0, tot = 0.0;
  for (int n = 0; n < m; ++n) {
    rho(n, n) = w;
    tot += w;
    w *= ratio;
  }
  rho /= tot;
  return rho;
}

MatrixXcd displacement_operator(cxd alpha, int dim) {
  // generator alpha a^dag - alpha^* a = i * h with Hermitian
  // h = -i(alpha a^dag - alpha^* a); then D = exp(i h)
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  const cxd ia = cxd(0.0, -1.0) * alpha;
  for (int n = 1; n < dim; ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    h(n, n - 1) = ia * s;            // -i alpha (a^dag)_{n,n-1}
    h(n - 1, n) = std::conj(ia * s); // Hermitian partner
  }
  return linalg::expm_i_hermitian(h, -1.0);
}

} // namespace kerrcav::fock
