// Truncated Fock-space building blocks: ladder algebra, parity, coherent and
// thermal states, and the displacement unitary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kerrcav/fock.hpp"

#include <cmath>
#include <complex>

using namespace kerrcav;
using cxd = std::complex<double>;

TEST_CASE("ladder algebra on the truncated space") {
  const int m = 12;
  const auto a = fock::annihilation(m);
  const auto n = fock::number_operator(m);

  // a |k> = sqrt(k) |k-1>
  for (int k = 1; k < m; ++k) {
    const Eigen::VectorXcd v = a * fock::fock_vector(k, m);
    CHECK(std::abs(v(k - 1) - std::sqrt(static_cast<double>(k))) < 1e-14);
    CHECK((v.squaredNorm() - static_cast<double>(k)) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }

  CHECK((a.adjoint() * a - n).cwiseAbs().maxCoeff() < 1e-13);

  // [a, a^dag] = 1 except the truncation corner, which closes the algebra
  const Eigen::MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
  for (int k = 0; k < m - 1; ++k)
    CHECK(std::abs(comm(k, k) - 1.0) < 1e-13);
  CHECK(std::abs(comm(m - 1, m - 1) - (1.0 - m)) < 1e-12);

  CHECK_THROWS_AS(fock::annihilation(0), std::invalid_argument);
  CHECK_THROWS_AS(fock::fock_vector(12, 12), std::invalid_argument);
  CHECK_THROWS_AS(fock::fock_vector(-1, 12), std::invalid_argument);
}

TEST_CASE("parity is an involution that flips the field sign") {
  const int m = 9;
  const auto p = fock::parity_operator(m);
  const auto a = fock::annihilation(m);
  CHECK((p * p - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK((p * a * p + a).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(p(0, 0) == cxd(1.0, 0.0));
  CHECK(p(1, 1) == cxd(-1.0, 0.0));
}

TEST_CASE("coherent amplitudes follow the Poisson law and renormalize") {
  const cxd alpha = std::polar(0.8, 0.3);
  const int m = 30;
  double loss = -1.0;
  const Eigen::VectorXcd v = fock::coherent_vector(alpha, m, &loss);
  CHECK(loss >= 0.0);
  CHECK(loss < 1e-14); // true tail ~1e-30; the report floors at roundoff
  CHECK(v.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));

  double log_fact = 0.0;
  for (int n = 0; n < 12; ++n) {
    if (n > 0) log_fact += std::log(static_cast<double>(n));
    const cxd expected = std::exp(-0.5 * std::norm(alpha)) *
                         std::pow(alpha, n) / std::exp(0.5 * log_fact);
    CHECK(std::abs(v(n) - expected) < 1e-13);
  }

  // mean field of the state is alpha (up to the vanishing tail)
  const Eigen::MatrixXcd a = fock::annihilation(m);
  const cxd mean = (v.adjoint() * a * v)(0, 0);
  CHECK(std::abs(mean - alpha) < 1e-12);
}

TEST_CASE("coherent truncation loss equals the Poisson tail") {
  // amplitude 2.5 at dimension 20: tail P(X >= 20), X ~ Poisson(6.25)
  double loss = 0.0;
  fock::coherent_vector(cxd(2.5, 0.0), 20, &loss);
  double term = std::exp(-6.25), cum = term;
  for (int k = 1; k < 20; ++k) {
    term *= 6.25 / k;
    cum += term;
  }
  CHECK(loss == doctest::Approx(1.0 - cum).epsilon(1e-10));
  CHECK(loss > 9e-6);
  CHECK(loss < 1e-5);
}

TEST_CASE("thermal state is geometric with unit trace and mean nbar") {
  const double nbar = 1.7;
  const int m = 80; // tail beyond 80 is ~(nbar/(nbar+1))^80 ~ 4e-16
  const auto rho = fock::thermal_density_matrix(nbar, m);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
  const double ratio = nbar / (nbar + 1.0);
  for (int n = 0; n + 1 < 10; ++n) {
    CHECK(std::abs(rho(n + 1, n + 1) / rho(n, n) - ratio) < 1e-13);
  }
  double mean = 0.0;
  for (int n = 0; n < m; ++n) mean += n * rho(n, n).real();
  CHECK(mean == doctest::Approx(nbar).epsilon(1e-12));

  const auto vac = fock::thermal_density_matrix(0.0, 5);
  CHECK(std::abs(vac(0, 0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(fock::thermal_density_matrix(-0.1, 5),
                  std::invalid_argument);
}

TEST_CASE("displacement operator is unitary and generates coherent states") {
  const cxd alpha(0.7, -0.4);
  const int dim = 40;
  const auto d = fock::displacement_operator(alpha, dim);
  CHECK((d * d.adjoint() - Eigen::MatrixXcd::Identity(dim, dim))
            .cwiseAbs()
            .maxCoeff() < 1e-13);

  // D(alpha)|0> = |alpha>
  const Eigen::VectorXcd from_d = d.col(0);
  const Eigen::VectorXcd coh = fock::coherent_vector(alpha, dim, nullptr);
  CHECK((from_d - coh).cwiseAbs().maxCoeff() < 1e-12);

  // D(-alpha) = D(alpha)^dag
  const auto dm = fock::displacement_operator(-alpha, dim);
  CHECK((dm - d.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  // composition in the same direction: D(a)D(a) = phase-free D(2a) here
  // (the symplectic phase Im(a conj(a)) vanishes for identical arguments)
  const auto d2 = fock::displacement_operator(2.0 * alpha, dim);
  CHECK(((d * d - d2).topLeftCorner(20, 20)).cwiseAbs().maxCoeff() < 1e-9);
}
