#pragma once

// Maps the flat-band continuum bath onto a nearest-neighbour hopping chain.
// For a hard-cutoff symmetric band the orthogonal-polynomial construction is
// closed form: every chain-site frequency vanishes and the hoppings follow a
// Legendre three-term recurrence ratio.

#include "kerrcav/model.hpp"

#include <vector>

namespace kerrcav::chain {

struct ChainCoefficients {
  double eta_sys = 0.0;             // system-to-chain coupling eta'
  std::vector<double> site_freqs;   // one per bath site, all exactly 0
  std::vector<double> hoppings;     // bath-internal hoppings, length N-2

  // conservative horizon before the reflected front re-enters the system
  double recurrence_time = 0.0;
};

// System occupies chain position 0, bath sites 1..N-1.
//   eta_sys    = sqrt(gamma * cutoff / pi)
//   hoppings[n] = cutoff * (n+1) / sqrt((2n+1)(2n+3)),  n = 0..N-3
// The hoppings decrease strictly toward cutoff/2 from above, with
//   0 < hoppings[n] - cutoff/2 <= cutoff / (2(2n+1)(2n+3)).
ChainCoefficients build_chain(const model::SystemParams& params, int n_sites);

// Quadrature check of the scaled-Legendre orthonormality underlying the
// chain construction: U_n(x) = sqrt((2n+1)/(2*x_max)) * P_n(x/x_max) on
// [-x_max, x_max].  Returns max |integral(U_n U_m) - delta_nm| over
// 0 <= n,m <= n_max using Gauss-Legendre quadrature with quad_points nodes.
// Throws std::invalid_argument when quad_points cannot integrate the
// degree-2*n_max products exactly (quad_points < n_max + 1).
double verify_legendre_orthonormality(int n_max, int quad_points,
                                      double x_max = 60.0);

} // namespace kerrcav::chain
