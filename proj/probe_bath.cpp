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

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  double e = argc > 1 ? std::atof(argv[1]) : 20.0;
  double amp = argc > 2 ? std::atof(argv[2]) : 0.0;
  double t_total = argc > 3 ? std::atof(argv[3]) : 0.6;
  auto p = paper(e);
  auto ch = chain::build_chain(p, 61);
  auto st = amp == 0.0
                ? mps::MPSState::vacuum(61, 20)
                : mps::MPSState::coherent_system(61, 20,
                                                 std::polar(amp, -0.37 * M_PI));
  tebd::TebdConfig cfg;
  cfg.dt = 1e-2;
  cfg.chi_max = 36;
  cfg.lambda_floor = 1e-6;
  tebd::evolve(st, p, ch, cfg, t_total, 20,
               [&](int, double t, const mps::MPSState& s) {
                 double occ_max = 0.0, tail8 = 0.0, tail10 = 0.0;
                 int i_max = 0;
                 for (int i = 1; i < s.n_sites(); ++i) {
                   obs::FockDensityMatrix r{s.site_density_matrix(i)};
                   double n = obs::occupation(r);
                   if (n > occ_max) {
                     occ_max = n;
                     i_max = i;
                   }
                   double t8 = 0.0, t10 = 0.0;
                   for (int k = 8; k < r.dim(); ++k) {
                     t8 += r.mat(k, k).real();
                     if (k >= 10) t10 += r.mat(k, k).real();
                   }
                   tail8 = std::max(tail8, t8);
                   tail10 = std::max(tail10, t10);
                 }
                 std::printf("t %.2f  max bath occ %.4f at site %d  tail>=8 "
                             "%.3e  tail>=10 %.3e\n",
                             t, occ_max, i_max, tail8, tail10);
               });
  return 0;
}
