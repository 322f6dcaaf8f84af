#pragma once

// Brute-force verification path: fixed-step RK4 integration of the
// zero-temperature master equation
//   d rho/dt = -i[H, rho] + gamma (a rho a^dag - {a^dag a, rho}/2)
// with H = delta a^dag a + chi2 a^dag^2 a^2 + i(a^dag E - a E^*),
// in a truncated Fock basis.  Deterministic by construction.

#include "kerrcav/model.hpp"
#include "kerrcav/observables.hpp"

#include <functional>

namespace kerrcav::master {

using Eigen::MatrixXcd;

struct LindbladConfig {
  int dim = 30;       // Fock truncation of the oracle
  double dt = 1e-3;   // fixed RK4 step
  double t_total = 2.0;

  void validate() const; // throws std::invalid_argument
};

class Integrator {
 public:
  Integrator(const model::SystemParams& params, int dim);

  const MatrixXcd& hamiltonian() const { return h_; }
  int dim() const { return dim_; }

  // right-hand side of the master equation
  MatrixXcd rhs(const MatrixXcd& rho) const;

  // one RK4 step followed by Hermitization, conditional trace
  // renormalization (drift > 1e-12) and a positivity gate (eigenvalue below
  // -1e-6 aborts, advising a smaller step or larger truncation).
  // `renormalize=false` leaves the trace untouched (drift diagnostics).
  void step(MatrixXcd& rho, double dt, bool renormalize = true) const;

  // fixed-step trajectory; observer is called at t=0 and after every
  // `stride` steps (and at the final step) with the current time and state
  using Observer = std::function<void(double, const obs::FockDensityMatrix&)>;
  void integrate(MatrixXcd& rho, double t_total, double dt, int stride,
                 const Observer& observer, bool renormalize = true) const;

  struct SteadyResult {
    obs::FockDensityMatrix rho;
    bool converged = false; // max |d rho/dt| fell below 1e-9
    double t_reached = 0.0;
  };

  // integrate from vacuum until the residual drops below 1e-9 or
  // t exceeds 50/gamma, whichever first; non-convergence is flagged, never
  // silent
  SteadyResult steady_state_longtime(double dt) const;

 private:
  int dim_;
  double gamma_;
  MatrixXcd h_;      // system Hamiltonian
  MatrixXcd a_;      // annihilation
  MatrixXcd n_op_;   // a^dag a
};

} // namespace kerrcav::master
