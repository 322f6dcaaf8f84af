#include "kerrcav/chain_mapping.hpp"
#include "kerrcav/model.hpp"
#include "kerrcav/mps.hpp"
#include "kerrcav/observables.hpp"
#include "kerrcav/tebd.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>

using namespace kerrcav;
using cxd = std::complex<double>;

static model::SystemParams paper(double e) {
  model::SystemParams p;
  p.delta = -12.0;
  p.chi2 = 1.5;
  p.gamma = 6.28;
  p.drive = cxd(e, 0.0);
  p.cutoff = 60.0;
  return p;
}

static void run(double e, cxd alpha0, double floor_, double t_total,
                int stride) {
  auto p = paper(e);
  auto ch = chain::build_chain(p, 61);
  auto st = (std::abs(alpha0) == 0.0)
                ? mps::MPSState::vacuum(61, 20)
                : mps::MPSState::coherent_system(61, 20, alpha0);
  tebd::TebdConfig cfg;
  cfg.dt = 1e-2;
  cfg.chi_max = 36;
  cfg.lambda_floor = floor_;
  auto t0 = std::chrono::steady_clock::now();
  std::printf("E=%g floor=%g:\n", e, floor_);
  auto rep = tebd::evolve(
      st, p, ch, cfg, t_total, stride,
      [&](int k, double t, const mps::MPSState& s) {
        int chi_max = 0;
        long chi_sum = 0;
        for (int b = 0; b < s.n_sites() - 1; ++b) {
          chi_max = std::max(chi_max, s.bond_dim(b));
          chi_sum += s.bond_dim(b);
        }
        double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        obs::FockDensityMatrix rho{s.site_density_matrix(0)};
        std::printf("  t %.2f wall %6.1f chi_max %2d chi_mean %5.2f  n %.6f "
                    "a (%.6f,%.6f)\n",
                    t, wall, chi_max,
                    double(chi_sum) / (s.n_sites() - 1), obs::occupation(rho),
                    obs::mean_field(rho).real(), obs::mean_field(rho).imag());
        (void)k;
      });
  std::printf("  discarded %.3e norm_drift %.3e\n", rep.discarded_weight,
              rep.norm_drift);
}

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  double e = argc > 1 ? std::atof(argv[1]) : 1.0;
  double amp = argc > 2 ? std::atof(argv[2]) : 0.0;
  double floor_ = argc > 3 ? std::atof(argv[3]) : 1e-12;
  double t_total = argc > 4 ? std::atof(argv[4]) : 0.5;
  cxd a0 = amp == 0.0 ? cxd(0, 0) : std::polar(amp, -0.37 * M_PI);
  run(e, a0, floor_, t_total, 10);
  return 0;
}
