#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kerrcav/closed_form.hpp"
#include "kerrcav/fock.hpp"
#include "kerrcav/master_equation.hpp"
#include "kerrcav/model.hpp"
#include "kerrcav/observables.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

using namespace kerrcav;
using cxd = std::complex<double>;

namespace {

model::SystemParams params_at(double drive_re) {
  model::SystemParams pr;
  pr.delta = -12.0;
  pr.chi2 = 1.5;
  pr.gamma = 6.28;
  pr.cutoff = 60.0;
  pr.drive = {drive_re, 0.0};
  return pr;
}

Eigen::MatrixXcd vacuum_rho(int dim) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return rho;
}

} // namespace

TEST_CASE("config validation rejects unusable integrator settings") {
  master::LindbladConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  cfg.dim = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dim = 30;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 1e-3;
  cfg.t_total = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  CHECK_THROWS_AS(master::Integrator(params_at(1.0), 1), std::invalid_argument);

  master::Integrator integ(params_at(1.0), 8);
  Eigen::MatrixXcd rho = vacuum_rho(8);
  CHECK_THROWS_AS(integ.integrate(rho, 0.1, 1e-3, 0, nullptr),
                  std::invalid_argument);
}

TEST_CASE("occupation decays exponentially under pure loss") {
  // with the drive off, the photon number commutes with the Kerr Hamiltonian,
  // so d<n>/dt = -gamma <n> holds exactly even for the nonlinear oscillator
  auto pr = params_at(0.0);
  const int dim = 20;
  master::Integrator integ(pr, dim);

  const cxd alpha(1.0, -0.66);
  const Eigen::VectorXcd v = fock::coherent_vector(alpha, dim);
  Eigen::MatrixXcd rho = v * v.adjoint();
  const double n0 = obs::occupation(obs::FockDensityMatrix{rho});

  const double t_end = 0.4;
  integ.integrate(rho, t_end, 1e-3, 1000, nullptr);
  const double n_t = obs::occupation(obs::FockDensityMatrix{rho});
  CHECK(n_t == doctest::Approx(n0 * std::exp(-pr.gamma * t_end)).epsilon(1e-9));
}

TEST_CASE("mean-field equation of motion matches the generator") {
  // Ehrenfest relation for the driven Kerr oscillator:
  //   d<a>/dt = (-i delta - gamma/2) <a> - 2 i chi2 <a^dag a^2> + E
  auto pr = params_at(8.0);

  auto residual = [&pr](const Eigen::MatrixXcd& rho) {
    const int dim = static_cast<int>(rho.rows());
    master::Integrator integ(pr, dim);
    const Eigen::MatrixXcd a = fock::annihilation(dim);
    const cxd lhs = (a * integ.rhs(rho)).trace();
    const cxd mean_a = (a * rho).trace();
    const cxd mean_ada2 = (a.adjoint() * a * a * rho).trace();
    const cxd rhs = (cxd(0.0, -1.0) * pr.delta - 0.5 * pr.gamma) * mean_a -
                    cxd(0.0, 2.0) * pr.chi2 * mean_ada2 + pr.drive;
    return std::abs(lhs - rhs);
  };

  // a state with compact Fock support sits far from the truncation corner,
  // so the identity holds to round-off
  {
    const int dim = 22;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi(0) = 1.0;
    psi(3) = 0.7;
    psi(7) = cxd(0.0, 0.2);
    psi /= psi.norm();
    const Eigen::MatrixXcd rho = psi * psi.adjoint();
    CHECK(residual(rho) < 1e-12);
  }

  // a displaced thermal state has a geometric tail; the corner artifact
  // shrinks with that tail as the truncation grows
  {
    const int dim = 34;
    const Eigen::MatrixXcd d = fock::displacement_operator(cxd(0.8, 0.3), dim);
    const Eigen::MatrixXcd th = fock::thermal_density_matrix(0.5, dim);
    const Eigen::MatrixXcd rho = d * th * d.adjoint();
    CHECK(residual(rho) < 1e-9);
  }
}

TEST_CASE("trace is conserved to round-off without renormalization") {
  auto pr = params_at(8.0);
  master::Integrator integ(pr, 30);
  Eigen::MatrixXcd rho = vacuum_rho(30);
  integ.integrate(rho, 1.0, 1e-3, 1000, nullptr, /*renormalize=*/false);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
  CHECK(std::abs(rho.trace().imag()) < 1e-14);
}

TEST_CASE("integrator error scales as the fourth power of the step") {
  // the linear cavity (chi2 = 0) has the exact mean-field solution
  //   <a>(t) = a_ss + (<a>(0) - a_ss) exp[(-i delta - gamma/2) t]
  // so halving dt must shrink the error by about 2^4
  model::SystemParams pr;
  pr.delta = -3.0;
  pr.chi2 = 0.0;
  pr.gamma = 2.0;
  pr.cutoff = 60.0;
  pr.drive = {1.0, 0.0};

  const int dim = 24;
  const cxd a0(1.2, -0.4);
  const cxd a_ss = pr.drive / (pr.gamma / 2.0 + cxd(0.0, 1.0) * pr.delta);
  const double t_end = 0.5;
  const cxd lam(-pr.gamma / 2.0, -pr.delta);
  const cxd exact = a_ss + (a0 - a_ss) * std::exp(lam * t_end);

  master::Integrator integ(pr, dim);
  double err[2];
  int k = 0;
  for (double dt : {4e-3, 2e-3}) {
    const Eigen::VectorXcd v = fock::coherent_vector(a0, dim);
    Eigen::MatrixXcd rho = v * v.adjoint();
    integ.integrate(rho, t_end, dt, 1000, nullptr, /*renormalize=*/false);
    err[k++] = std::abs(obs::mean_field(obs::FockDensityMatrix{rho}) - exact);
  }
  CHECK(err[0] < 1e-9);
  CHECK(err[0] / err[1] > 12.0); // fourth order gives 16
}

TEST_CASE("observer cadence covers start, stride multiples, and final step") {
  auto pr = params_at(1.0);
  master::Integrator integ(pr, 10);

  std::vector<double> times;
  auto record = [&](double t, const obs::FockDensityMatrix&) {
    times.push_back(t);
  };

  Eigen::MatrixXcd rho = vacuum_rho(10);
  integ.integrate(rho, 0.01, 1e-3, 3, record);
  REQUIRE(times.size() == 5);
  CHECK(times[0] == 0.0);
  CHECK(times[1] == 3.0 * 1e-3);
  CHECK(times[2] == 6.0 * 1e-3);
  CHECK(times[3] == 9.0 * 1e-3);
  CHECK(times[4] == 10.0 * 1e-3);

  // zero-length trajectories still report the initial state
  times.clear();
  rho = vacuum_rho(10);
  integ.integrate(rho, 0.0, 1e-3, 3, record);
  REQUIRE(times.size() == 1);
  CHECK(times[0] == 0.0);

  // a stride longer than the run collapses to endpoints only
  times.clear();
  rho = vacuum_rho(10);
  integ.integrate(rho, 0.005, 1e-3, 100, record);
  REQUIRE(times.size() == 2);
  CHECK(times[0] == 0.0);
  CHECK(times[1] == 5.0 * 1e-3);
}

TEST_CASE("Fock truncation is converged for the strong-drive transient") {
  auto pr = params_at(8.0);
  double g2_by_dim[2];
  int k = 0;
  for (int dim : {30, 35}) {
    master::Integrator integ(pr, dim);
    Eigen::MatrixXcd rho = vacuum_rho(dim);
    integ.integrate(rho, 2.0, 1e-3, 2000, nullptr);
    g2_by_dim[k++] = obs::g2_zero(obs::FockDensityMatrix{rho});
  }
  CHECK(std::abs(g2_by_dim[0] - g2_by_dim[1]) < 1e-4);
}

TEST_CASE("long-time integration reaches the closed-form steady state") {
  // the weak-drive response relaxes quickly, so the residual gate must
  // trigger well before the time cap
  auto pr = params_at(1.0);
  const int dim = 20;
  master::Integrator integ(pr, dim);
  const auto res = integ.steady_state_longtime(1e-3);
  CHECK(res.converged);
  CHECK(res.t_reached < 50.0 / pr.gamma);

  const closed_form::SteadyState ss(pr);
  const cxd f_num = obs::mean_field(res.rho);
  const cxd f_ref = ss.field();

  // the closed-form branch fixes the opposite sign of the intracavity field
  // (a global parity image); parity-invariant quantities agree directly
  CHECK(std::abs(f_num + f_ref) < 1e-8);
  CHECK(std::abs(std::abs(f_num) - std::abs(f_ref)) < 1e-8);
  CHECK(obs::occupation(res.rho) == doctest::Approx(ss.occupation()).epsilon(1e-7));
  CHECK(obs::g2_zero(res.rho) == doctest::Approx(ss.g2()).epsilon(1e-6));
  CHECK(std::abs(obs::non_gaussianity(res.rho) -
                 obs::non_gaussianity(ss.density_matrix(dim))) < 1e-10);
}

TEST_CASE("slow relaxation inside the bistable window is flagged") {
  // between the fold drives the oscillator hops between two metastable
  // branches on a timescale far beyond 1/gamma, so the residual gate cannot
  // be met within the time cap; the result must say so rather than pretend
  auto pr = params_at(8.0);
  master::Integrator integ(pr, 30);
  const auto res = integ.steady_state_longtime(1e-3);
  CHECK_FALSE(res.converged);
  CHECK(res.t_reached >= 50.0 / pr.gamma - 1e-9);

  // the returned state is still physical and already near the attractor
  const closed_form::SteadyState ss(pr);
  CHECK(std::abs(obs::occupation(res.rho) - ss.occupation()) < 1e-2);
  CHECK(std::abs(obs::g2_zero(res.rho) - ss.g2()) < 1e-2);
}

TEST_CASE("unstable steps abort with actionable guidance") {
  auto pr = params_at(8.0);
  master::Integrator integ(pr, 30);
  Eigen::MatrixXcd rho = vacuum_rho(30);
  bool threw = false;
  try {
    integ.integrate(rho, 2.0, 0.05, 40, nullptr);
  } catch (const std::runtime_error& ex) {
    threw = true;
    CHECK(std::string(ex.what()).find("reduce dt") != std::string::npos);
  }
  CHECK(threw);
}
