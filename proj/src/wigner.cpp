#include "kerrcav/wigner.hpp"

#include "kerrcav/fock.hpp"
#include "kerrcav/linalg.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace kerrcav::wigner {

using cxd = std::complex<double>;

GridSpec GridSpec::square(double half_width, int points) {
  GridSpec g;
  g.x_min = -half_width;
  g.x_max = half_width;
  g.p_min = -half_width;
  g.p_max = half_width;
  g.nx = points;
  g.np = points;
  return g;
}

double GridSpec::corner_radius() const {
  const double xr = std::max(std::abs(x_min), std::abs(x_max));
  const double pr = std::max(std::abs(p_min), std::abs(p_max));
  return std::hypot(xr, pr);
}

void GridSpec::validate() const {
  if (!(x_max > x_min) || !(p_max > p_min))
    throw std::invalid_argument("GridSpec: empty range");
  if (nx < 2 || np < 2)
    throw std::invalid_argument("GridSpec: need at least 2 points per axis");
}

int padded_dimension(int dim, double alpha_max) {
  const double support = std::sqrt(static_cast<double>(std::max(dim - 1, 1)));
  const double needed = (support + alpha_max) * (support + alpha_max);
  return std::max(dim + 8, static_cast<int>(std::ceil(needed)) + 8);
}

namespace {

bool support_inside(const FockDensityMatrix& rho, const GridSpec& spec) {
  double n1 = 0.0, n2 = 0.0;
  for (int n = 0; n < rho.dim(); ++n) {
    const double p = rho.mat(n, n).real();
    n1 += n * p;
    n2 += static_cast<double>(n) * n * p;
  }
  const double var = std::max(0.0, n2 - n1 * n1);
  const double reach = n1 + 3.0 * std::sqrt(var); // photon-number reach
  const double r_min = std::min({std::abs(spec.x_min), std::abs(spec.x_max),
                                 std::abs(spec.p_min), std::abs(spec.p_max)});
  return reach <= r_min * r_min;
}

} // namespace

WignerGrid displaced_parity_grid(const FockDensityMatrix& rho,
                                 const GridSpec& spec, int n_threads) {
  spec.validate();
  const int m = rho.dim();
  const int dim = padded_dimension(m, spec.corner_radius());

  WignerGrid out;
  out.spec = spec;
  out.values.resize(spec.np, spec.nx);
  out.support_warning = !support_inside(rho, spec);

  Eigen::MatrixXcd rho_pad = Eigen::MatrixXcd::Zero(dim, dim);
  rho_pad.topLeftCorner(m, m) = rho.mat;

  // factorization W(x+ip) = (2/pi) Tr[(D(x)^H rho D(x)) (D(ip) Pi D(ip)^H)];
  // the cross phase of D(x)D(ip) cancels inside the trace
  const Eigen::MatrixXcd pi_op = fock::parity_operator(dim);
  std::vector<Eigen::MatrixXcd> row_kernels(static_cast<size_t>(spec.np));
  for (int j = 0; j < spec.np; ++j) {
    const Eigen::MatrixXcd dp =
        fock::displacement_operator(cxd(0.0, spec.p_at(j)), dim);
    row_kernels[static_cast<size_t>(j)].noalias() =
        dp * pi_op * dp.adjoint();
  }

  const double pref = 2.0 / std::numbers::pi;
  auto column_worker = [&](int i) {
    const Eigen::MatrixXcd dx =
        fock::displacement_operator(cxd(spec.x_at(i), 0.0), dim);
    const Eigen::MatrixXcd rho_x = dx.adjoint() * rho_pad * dx;
    for (int j = 0; j < spec.np; ++j) {
      // Tr[A B] = sum_{r,c} A(r,c) B(c,r)
      const cxd tr =
          (rho_x.array() * row_kernels[static_cast<size_t>(j)].transpose().array())
              .sum();
      out.values(j, i) = pref * tr.real();
    }
  };

  n_threads = std::max(1, n_threads);
  if (n_threads == 1) {
    for (int i = 0; i < spec.nx; ++i) column_worker(i);
  } else {
    std::vector<std::thread> pool;
    // static block partition: deterministic assignment, disjoint columns
    const int per = (spec.nx + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      const int lo = w * per;
      const int hi = std::min(spec.nx, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (int i = lo; i < hi; ++i) column_worker(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

double displaced_parity_point(const FockDensityMatrix& rho, cxd alpha,
                              int dim_override) {
  const int m = rho.dim();
  const int dim =
      dim_override > 0 ? dim_override : padded_dimension(m, std::abs(alpha));
  Eigen::MatrixXcd rho_pad = Eigen::MatrixXcd::Zero(dim, dim);
  rho_pad.topLeftCorner(m, m) = rho.mat;
  const Eigen::MatrixXcd d = fock::displacement_operator(alpha, dim);
  const Eigen::MatrixXcd displaced = d.adjoint() * rho_pad * d;
  cxd tr(0.0, 0.0);
  for (int n = 0; n < dim; ++n)
    tr += (n % 2 == 0 ? 1.0 : -1.0) * displaced(n, n);
  return 2.0 / std::numbers::pi * tr.real();
}

void write_grid_csv(const WignerGrid& grid, const std::string& csv_path,
                    const std::string& sidecar_path) {
  std::FILE* f = std::fopen(csv_path.c_str(), "w");
  if (!f)
    throw std::runtime_error("write_grid_csv: cannot open " + csv_path);
  for (int j = 0; j < grid.spec.np; ++j) {
    for (int i = 0; i < grid.spec.nx; ++i)
      std::fprintf(f, i + 1 < grid.spec.nx ? "%.17g," : "%.17g",
                   grid.values(j, i));
    std::fprintf(f, "\n");
  }
  std::fclose(f);

  nlohmann::ordered_json side;
  side["x_range"] = {grid.spec.x_min, grid.spec.x_max};
  side["p_range"] = {grid.spec.p_min, grid.spec.p_max};
  side["nx"] = grid.spec.nx;
  side["np"] = grid.spec.np;
  side["time"] = grid.time;
  side["normalization"] = grid.normalization();
  side["normalization_deficit"] = 1.0 - grid.normalization();
  side["support_warning"] = grid.support_warning;
  side["fallback_points"] = grid.fallback_points;
  std::ofstream out(sidecar_path);
  if (!out)
    throw std::runtime_error("write_grid_csv: cannot open " + sidecar_path);
  out << side.dump(2) << "\n";
}

} // namespace kerrcav::wigner
