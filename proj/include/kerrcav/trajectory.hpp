#pragma once

// Time-series records of single-site observables and their CSV form.

#include "kerrcav/model.hpp"
#include "kerrcav/observables.hpp"

#include <string>
#include <vector>

namespace kerrcav::traj {

using cxd = std::complex<double>;

struct Snapshot {
  double t = 0.0;
  cxd mean_field{0.0, 0.0};
  double occupation = 0.0;
  double g2 = 0.0;              // NaN when undefined (empty cavity)
  double fidelity = 0.0;        // overlap with the coherent state at <a>
  double non_gaussianity = 0.0; // relative entropy to the closest Gaussian
  double trunc_error = 0.0;     // cumulative discarded squared weight
};

// observables of one state; g2 and the non-Gaussianity fall back to NaN
// where they are undefined instead of aborting a whole trajectory
Snapshot make_snapshot(double t, const obs::FockDensityMatrix& rho,
                       double trunc_error);

// header t,re_mean_field,im_mean_field,occupation,g2,fidelity,
// non_gaussianity,trunc_error; every value printed with %.17g
void write_trajectory_csv(const std::string& path,
                          const std::vector<Snapshot>& rows);

// mean field of the undriven-Kerr (linear) cavity started from vacuum:
// E/(i delta + gamma/2) * (1 - exp(-(i delta + gamma/2) t))
cxd linear_cavity_field(const model::SystemParams& params, double t);

} // namespace kerrcav::traj
