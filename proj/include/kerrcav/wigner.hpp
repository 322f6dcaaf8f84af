#pragma once

// Phase-space quasiprobability on a rectangular grid, evaluated from a
// Fock-basis density matrix through the displaced-parity identity
//   W(alpha) = (2/pi) Tr[ D(-alpha) rho D(alpha) Pi ].
// Displacements act in an internally padded space sized so that the state
// displaced to the farthest grid point stays clear of the truncation edge.

#include "kerrcav/observables.hpp"

#include <string>

namespace kerrcav::wigner {

using obs::FockDensityMatrix;

struct GridSpec {
  double x_min = -3.0, x_max = 3.0; // Re(alpha) range
  double p_min = -3.0, p_max = 3.0; // Im(alpha) range
  int nx = 101, np = 101;

  static GridSpec square(double half_width, int points);
  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dp() const { return (p_max - p_min) / (np - 1); }
  double x_at(int i) const { return x_min + i * dx(); }
  double p_at(int j) const { return p_min + j * dp(); }
  // largest |alpha| over the grid corners
  double corner_radius() const;
  void validate() const; // throws std::invalid_argument
};

struct WignerGrid {
  GridSpec spec;
  Eigen::MatrixXd values;   // values(j, i) = W(x_i + i p_j), rows = p index
  double time = 0.0;        // simulation time of the frame (0 for steady)
  bool support_warning = false; // state support not safely inside the grid
  int fallback_points = 0;  // filled by the series evaluator when used

  // Riemann sum approximation of the normalization integral
  double normalization() const {
    return values.sum() * spec.dx() * spec.dp();
  }
};

// padded dimension used for the displacement operators: never below
// dim + 8, grown with the grid radius so edge reflections stay below
// machine noise
int padded_dimension(int dim, double alpha_max);

// evaluate the full grid; columns may be computed by `n_threads` workers
// (results are written to disjoint columns, so the output is independent of
// scheduling).  Sets support_warning when <n> + 3*std(n) reaches outside the
// grid rectangle.
WignerGrid displaced_parity_grid(const FockDensityMatrix& rho,
                                 const GridSpec& spec, int n_threads = 1);

// single-point evaluation (direct, unfactorized); dim_override = 0 picks the
// same padded dimension the grid evaluator would use
double displaced_parity_point(const FockDensityMatrix& rho,
                              std::complex<double> alpha,
                              int dim_override = 0);

// CSV matrix plus JSON sidecar (ranges, resolution, frame time,
// normalization deficit, warnings)
void write_grid_csv(const WignerGrid& grid, const std::string& csv_path,
                    const std::string& sidecar_path);

} // namespace kerrcav::wigner
