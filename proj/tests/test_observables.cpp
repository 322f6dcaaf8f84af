// Diagnostics on Fock-basis density matrices.  Benchmarks used here have
// closed forms:
//   coherent |alpha>   : g2 = 1, nu = 1, fidelity 1, non-Gaussianity 0
//   Fock |1>           : g2 = 0, nu = 3, fidelity 0, non-Gaussianity 2 ln 2
//   thermal nbar       : g2 = 2, nu = 2 nbar + 1, non-Gaussianity 0
//   squeezed vacuum    : nu = 1, non-Gaussianity 0
//   even mix of |b>,|-b>: mean 0, so the classical proxy is vacuum and the
//                         overlap is exp(-b^2)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kerrcav/fock.hpp"
#include "kerrcav/linalg.hpp"
#include "kerrcav/observables.hpp"

#include <cmath>
#include <complex>

using namespace kerrcav;
using cxd = std::complex<double>;

namespace {

obs::FockDensityMatrix pure(const Eigen::VectorXcd& v) {
  return obs::FockDensityMatrix{v * v.adjoint()};
}

obs::FockDensityMatrix coherent_rho(cxd alpha, int m) {
  return pure(fock::coherent_vector(alpha, m, nullptr));
}

} // namespace

TEST_CASE("density-matrix validation gates") {
  obs::FockDensityMatrix rho = coherent_rho(cxd(0.9, 0.2), 24);
  CHECK_NOTHROW(rho.validate());

  obs::FockDensityMatrix bad = rho;
  bad.mat(0, 1) += cxd(0.0, 1e-6); // break Hermiticity
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);

  bad = rho;
  bad.mat(0, 0) += 1e-6; // break the trace
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);

  // trace-one Hermitian matrix with a -0.001/24 eigenvalue band
  bad = rho;
  bad.mat = 1.001 * rho.mat - 0.001 * Eigen::MatrixXcd::Identity(24, 24) / 24.0;
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
}

TEST_CASE("coherent state: unit fidelity, flat g2, vacuum-level moments") {
  const cxd alpha(1.1, -0.6);
  const auto rho = coherent_rho(alpha, 40);

  CHECK(std::abs(obs::mean_field(rho) - alpha) < 1e-12);
  CHECK(obs::occupation(rho) ==
        doctest::Approx(std::norm(alpha)).epsilon(1e-12));
  CHECK(obs::g2_zero(rho) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(obs::fidelity_to_classical(rho) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(obs::non_gaussianity(rho)) < 1e-6);

  const auto g = obs::closest_gaussian_moments(rho);
  CHECK(g.sigma_xx() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(g.sigma_pp() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(g.sigma_xp()) < 1e-10);
  CHECK(g.symplectic_nu() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("single-photon state: antibunched, maximally non-Gaussian at n=1") {
  const auto rho = pure(fock::fock_vector(1, 16));
  CHECK(std::abs(obs::mean_field(rho)) < 1e-15);
  CHECK(obs::occupation(rho) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(obs::g2_zero(rho) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(obs::fidelity_to_classical(rho) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(obs::non_gaussianity(rho) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-6));
  CHECK(obs::von_neumann_entropy(rho) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-10));

  const auto g = obs::closest_gaussian_moments(rho);
  CHECK(g.symplectic_nu() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("thermal state: bunched, Gaussian, nu = 2 nbar + 1") {
  const double nbar = 0.5;
  const auto rho = obs::FockDensityMatrix{fock::thermal_density_matrix(nbar, 70)};
  CHECK(obs::occupation(rho) == doctest::Approx(nbar).epsilon(1e-12));
  CHECK(obs::g2_zero(rho) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(obs::non_gaussianity(rho)) < 1e-6);
  const auto g = obs::closest_gaussian_moments(rho);
  CHECK(g.symplectic_nu() == doctest::Approx(2.0 * nbar + 1.0).epsilon(1e-10));

  // entropy of the geometric distribution
  const double expected_s = (nbar + 1.0) * std::log(nbar + 1.0) -
                            nbar * std::log(nbar);
  CHECK(obs::von_neumann_entropy(rho) ==
        doctest::Approx(expected_s).epsilon(1e-10));
}

TEST_CASE("squeezed vacuum stays Gaussian with nu = 1") {
  const int m = 60;
  const double r = 0.4;
  // exp(r (a^2 - a^dag^2)/2) = exp(-i h) with h = -i r (a^2 - a^dag^2)/2
  const Eigen::MatrixXcd a = fock::annihilation(m);
  const Eigen::MatrixXcd g =
      0.5 * r * (a * a - (a * a).adjoint().eval());
  const Eigen::MatrixXcd h = cxd(0.0, -1.0) * g;
  const Eigen::MatrixXcd s = linalg::expm_i_hermitian(h, -1.0);
  Eigen::VectorXcd v = s * fock::fock_vector(0, m);
  v /= v.norm();
  const auto rho = pure(v);

  const auto gm = obs::closest_gaussian_moments(rho);
  CHECK(gm.sigma_xx() ==
        doctest::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-8));
  CHECK(gm.sigma_pp() ==
        doctest::Approx(0.5 * std::exp(2.0 * r)).epsilon(1e-8));
  CHECK(gm.symplectic_nu() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(obs::non_gaussianity(rho)) < 1e-6);
}

TEST_CASE("diagnostics are invariant under phase-space rotation") {
  const cxd alpha(0.9, 0.4);
  const int m = 34;
  Eigen::VectorXcd v = fock::coherent_vector(alpha, m, nullptr);
  // superpose a photon-subtracted component to get a non-Gaussian state
  Eigen::VectorXcd w = fock::annihilation(m) * v;
  v = (v + 0.7 * w).eval();
  v /= v.norm();
  auto rho = pure(v);

  const double g2_0 = obs::g2_zero(rho);
  const double ng_0 = obs::non_gaussianity(rho);
  const double abs_mean_0 = std::abs(obs::mean_field(rho));

  const double theta = 0.77;
  Eigen::VectorXcd ph(m);
  for (int n = 0; n < m; ++n) ph(n) = std::polar(1.0, theta * n);
  obs::FockDensityMatrix rot{ph.asDiagonal() * rho.mat *
                             ph.conjugate().asDiagonal()};

  CHECK(obs::g2_zero(rot) == doctest::Approx(g2_0).epsilon(1e-12));
  CHECK(obs::non_gaussianity(rot) == doctest::Approx(ng_0).epsilon(1e-9));
  CHECK(std::abs(obs::mean_field(rot)) ==
        doctest::Approx(abs_mean_0).epsilon(1e-12));
  CHECK(std::arg(obs::mean_field(rot)) ==
        doctest::Approx(std::arg(obs::mean_field(rho)) + theta).epsilon(1e-9));
}

TEST_CASE("even mixture of opposite coherent states overlaps vacuum as "
          "exp(-b^2)") {
  const double b = 1.3;
  const int m = 36;
  const auto plus = fock::coherent_vector(cxd(b, 0.0), m, nullptr);
  const auto minus = fock::coherent_vector(cxd(-b, 0.0), m, nullptr);
  obs::FockDensityMatrix rho{0.5 * (plus * plus.adjoint()) +
                             0.5 * (minus * minus.adjoint())};

  CHECK(std::abs(obs::mean_field(rho)) < 1e-12);
  CHECK(obs::fidelity_to_classical(rho) ==
        doctest::Approx(std::exp(-b * b)).epsilon(1e-9));
  CHECK(obs::non_gaussianity(rho) > 0.01);
}

TEST_CASE("guard rails: empty mode, sub-Heisenberg moments, deep negativity") {
  obs::FockDensityMatrix vac = pure(fock::fock_vector(0, 8));
  CHECK_THROWS_AS(obs::g2_zero(vac), std::runtime_error);

  // fabricated anomalous moment with no occupation: nu = 2 sqrt(0.2*0.8) < 1
  obs::FockDensityMatrix fake{Eigen::MatrixXcd::Zero(8, 8)};
  fake.mat(0, 0) = 1.0;
  fake.mat(2, 0) = 0.3 / std::sqrt(2.0); // <a a> = 0.3
  fake.mat(0, 2) = 0.3 / std::sqrt(2.0);
  CHECK_THROWS_AS(obs::closest_gaussian_moments(fake), std::runtime_error);

  obs::FockDensityMatrix neg{Eigen::MatrixXcd::Zero(3, 3)};
  neg.mat(0, 0) = 1.0 + 2e-6;
  neg.mat(1, 1) = -2e-6; // beyond truncation noise
  CHECK_THROWS_AS(obs::von_neumann_entropy(neg), std::runtime_error);

  obs::FockDensityMatrix mild = neg;
  mild.mat(1, 1) = -0.5e-9; // clamped band
  mild.mat(0, 0) = 1.0 + 0.5e-9;
  CHECK_NOTHROW(obs::von_neumann_entropy(mild));
}

TEST_CASE("half-half mixture of the two lowest Fock states") {
  obs::FockDensityMatrix rho{Eigen::MatrixXcd::Zero(6, 6)};
  rho.mat(0, 0) = 0.5;
  rho.mat(1, 1) = 0.5;
  CHECK(obs::von_neumann_entropy(rho) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(obs::occupation(rho) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(obs::g2_zero(rho) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}
