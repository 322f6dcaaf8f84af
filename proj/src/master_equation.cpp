#include "kerrcav/master_equation.hpp"

#include "kerrcav/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kerrcav::master {

void LindbladConfig::validate() const {
  if (dim < 2) throw std::invalid_argument("LindbladConfig: dim must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("LindbladConfig: dt must be > 0");
  if (t_total < 0.0)
    throw std::invalid_argument("LindbladConfig: t_total must be >= 0");
}

Integrator::Integrator(const model::SystemParams& params, int dim)
    : dim_(dim), gamma_(params.gamma) {
  if (dim < 2) throw std::invalid_argument("Integrator: dim must be >= 2");
  a_ = fock::annihilation(dim);
  n_op_ = fock::number_operator(dim);
  const MatrixXcd ad = a_.adjoint();
  h_ = params.delta * n_op_ + params.chi2 * (ad * ad * a_ * a_) +
       std::complex<double>(0.0, 1.0) *
           (ad * params.drive - a_ * std::conj(params.drive));
}

MatrixXcd Integrator::rhs(const MatrixXcd& rho) const {
  const std::complex<double> mi(0.0, -1.0);
  MatrixXcd out = mi * (h_ * rho - rho * h_);
  out.noalias() += gamma_ * (a_ * rho * a_.adjoint());
  out.noalias() -= (0.5 * gamma_) * (n_op_ * rho);
  out.noalias() -= (0.5 * gamma_) * (rho * n_op_);
  return out;
}

void Integrator::step(MatrixXcd& rho, double dt, bool renormalize) const {
  const MatrixXcd k1 = rhs(rho);
  const MatrixXcd k2 = rhs(rho + (0.5 * dt) * k1);
  const MatrixXcd k3 = rhs(rho + (0.5 * dt) * k2);
  const MatrixXcd k4 = rhs(rho + dt * k3);
  rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  rho = 0.5 * (rho + rho.adjoint().eval());
  const double tr = rho.trace().real();
  if (renormalize && std::abs(tr - 1.0) > 1e-12) rho /= tr;

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-6)
    throw std::runtime_error(
        "master-equation step: eigenvalue " + std::to_string(min_eig) +
        " below -1e-6; reduce dt or enlarge the Fock truncation");
}

void Integrator::integrate(MatrixXcd& rho, double t_total, double dt,
                           int stride, const Observer& observer,
                           bool renormalize) const {
  if (stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");
  const long n_steps =
      (t_total <= 0.0) ? 0 : static_cast<long>(std::ceil(t_total / dt - 1e-12));
  if (observer) observer(0.0, obs::FockDensityMatrix{rho});
  for (long s = 1; s <= n_steps; ++s) {
    step(rho, dt, renormalize);
    if (observer && (s % stride == 0 || s == n_steps))
      observer(static_cast<double>(s) * dt, obs::FockDensityMatrix{rho});
  }
}

Integrator::SteadyResult Integrator::steady_state_longtime(double dt) const {
  MatrixXcd rho = MatrixXcd::Zero(dim_, dim_);
  rho(0, 0) = 1.0;
  const double t_max = 50.0 / gamma_;
  SteadyResult out;
  double t = 0.0;
  while (t < t_max) {
    const double residual = rhs(rho).cwiseAbs().maxCoeff();
    if (residual < 1e-9) {
      out.converged = true;
      break;
    }
    step(rho, dt);
    t += dt;
  }
  out.rho = obs::FockDensityMatrix{rho};
  out.t_reached = t;
  return out;
}

} // namespace kerrcav::master
