#pragma once

// Physical parameters, unit conventions, initial-state description, and the
// mean-field (semiclassical) steady-state solver for the driven dissipative
// Kerr oscillator.  All frequencies are in units of the bath coupling scale g
// and times in 1/g.

#include <complex>
#include <string>
#include <vector>

namespace kerrcav::model {

using cxd = std::complex<double>;

struct SystemParams {
  double delta = 0.0;      // detuning
  double chi2 = 0.0;       // Kerr anharmonicity (0 only for linear-cavity checks)
  double gamma = 0.0;      // dissipation rate, > 0
  cxd drive{0.0, 0.0};     // coherent drive amplitude E
  double cutoff = 0.0;     // bath band hard cutoff omega_c, > 0

  double drive_abs() const { return std::abs(drive); }
  double drive_arg() const { return std::arg(drive); }

  // throws std::invalid_argument on hard violations; returns human-readable
  // warnings (e.g. a cutoff too close to gamma) without failing
  std::vector<std::string> validate() const;
};

struct InitialState {
  double amplitude = 0.0; // non-negative
  double phase = 0.0;     // folded into (-pi, pi]

  static InitialState make(double amplitude, double phase);
  cxd field() const { return std::polar(amplitude, phase); }
};

struct SimulationConfig {
  int n_sites = 61;        // total chain length, system is site 0
  int local_dim = 20;      // per-site Fock truncation M
  int bond_dim = 36;       // Schmidt-rank cap
  double dt = 1e-2;        // Trotter step
  double t_total = 2.0;    // evolution horizon (0 = initial snapshot only)
  int snapshot_stride = 1; // steps between observable dumps

  void validate() const; // throws std::invalid_argument
};

// |E|^2 required to hold a mean-field occupation n stationary:
//   |E|^2 = n * ((delta + 2*chi2*n)^2 + gamma^2/4)
double semiclassical_drive_for_field(const SystemParams& p, double n);

// All real non-negative occupations n solving
//   4*chi2^2*n^3 + 4*delta*chi2*n^2 + (delta^2+gamma^2/4)*n - drive_sq = 0,
// ascending.  One or three roots; two at a fold tangency (within a relative
// discriminant tolerance of 1e-8).  chi2 = 0 degenerates to the single
// linear-cavity root.
std::vector<double> semiclassical_branches(const SystemParams& p,
                                           double drive_sq);

// Mean-field bistability condition: delta < -gamma*sqrt(3)/2, strict.
bool is_bistable(const SystemParams& p);

} // namespace kerrcav::model
