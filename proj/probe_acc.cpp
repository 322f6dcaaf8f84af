#include "kerrcav/chain_mapping.hpp"
#include "kerrcav/closed_form.hpp"
#include "kerrcav/master_equation.hpp"
#include "kerrcav/model.hpp"
#include "kerrcav/mps.hpp"
#include "kerrcav/observables.hpp"
#include "kerrcav/tebd.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

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

struct Row {
  double t;
  cxd a;
  double n;
  double g2;
};

static std::vector<Row> tebd_run(const model::SystemParams& p, cxd alpha0,
                                 int n_sites, int m, int chi, double dt,
                                 double t_total, int stride, double* wall) {
  auto t0 = std::chrono::steady_clock::now();
  auto ch = chain::build_chain(p, n_sites);
  auto st = (std::abs(alpha0) == 0.0)
                ? mps::MPSState::vacuum(n_sites, m)
                : mps::MPSState::coherent_system(n_sites, m, alpha0);
  tebd::TebdConfig cfg;
  cfg.dt = dt;
  cfg.chi_max = chi;
  std::vector<Row> rows;
  tebd::evolve(st, p, ch, cfg, t_total, stride,
               [&](int, double t, const mps::MPSState& s) {
                 obs::FockDensityMatrix rho{s.site_density_matrix(0)};
                 Row r;
                 r.t = t;
                 r.a = obs::mean_field(rho);
                 r.n = obs::occupation(rho);
                 r.g2 = r.n > 1e-12 ? obs::g2_zero(rho) : std::nan("");
                 rows.push_back(r);
               });
  *wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
  return rows;
}

static std::vector<Row> lindblad_run(const model::SystemParams& p, int dim,
                                     double dt, double t_total, int stride) {
  master::Integrator integ(p, dim);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1.0;
  std::vector<Row> rows;
  integ.integrate(rho, t_total, dt, stride,
                  [&](double t, const obs::FockDensityMatrix& r) {
                    Row q;
                    q.t = t;
                    q.a = obs::mean_field(r);
                    q.n = obs::occupation(r);
                    q.g2 = q.n > 1e-12 ? obs::g2_zero(r) : std::nan("");
                    rows.push_back(q);
                  });
  return rows;
}

static void triangle(double e, int lind_dim) {
  std::printf("== E = %g ==\n", e);
  auto p = paper(e);
  auto lind = lindblad_run(p, lind_dim, 1e-3, 2.0, 10);
  double wall = 0.0;
  auto teb = tebd_run(p, cxd(0, 0), 61, 20, 36, 1e-2, 2.0, 1, &wall);
  std::printf("tebd rows %zu lind rows %zu wall %.1f s\n", teb.size(),
              lind.size(), wall);
  double max_da = 0.0, t_da = 0.0, max_dg = 0.0, t_dg = 0.0;
  std::size_t nrow = std::min(teb.size(), lind.size());
  for (std::size_t i = 0; i < nrow; ++i) {
    double da = std::abs(teb[i].a - lind[i].a);
    if (da > max_da) {
      max_da = da;
      t_da = teb[i].t;
    }
    if (teb[i].n > 1e-6 && lind[i].n > 1e-6) {
      double dg = std::abs(teb[i].g2 - lind[i].g2);
      if (dg > max_dg) {
        max_dg = dg;
        t_dg = teb[i].t;
      }
    }
  }
  std::printf("max|da| %.6f at t %.2f   max|dg2| %.6f at t %.2f\n", max_da,
              t_da, max_dg, t_dg);
  for (std::size_t i = 1; i <= 8 && i < nrow; ++i)
    std::printf("  t %.2f  nT %.3e nL %.3e  dg2 %.4f  da %.5f\n", teb[i].t,
                teb[i].n, lind[i].n, std::abs(teb[i].g2 - lind[i].g2),
                std::abs(teb[i].a - lind[i].a));
  std::fflush(stdout);
}

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);

  triangle(1.0, 20);
  triangle(20.0, 45);

  {
    auto p = paper(20.0);
    master::Integrator integ(p, 45);
    auto t0 = std::chrono::steady_clock::now();
    auto sr = integ.steady_state_longtime(1e-3);
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    closed_form::SteadyState ss(p);
    double n_num = obs::occupation(sr.rho);
    double g_num = obs::g2_zero(sr.rho);
    std::printf("steady E=20 dim45: conv %d t %.3f wall %.1f s  dn_rel %.3e "
                "dg_rel %.3e\n",
                sr.converged ? 1 : 0, sr.t_reached, wall,
                std::abs(n_num - ss.occupation()) / ss.occupation(),
                std::abs(g_num - ss.g2()) / ss.g2());
  }
  {
    auto p = paper(1.0);
    master::Integrator integ(p, 20);
    auto sr = integ.steady_state_longtime(1e-3);
    closed_form::SteadyState ss(p);
    std::printf("steady E=1 dim20: conv %d t %.3f  dn_rel %.3e dg_rel %.3e\n",
                sr.converged ? 1 : 0, sr.t_reached,
                std::abs(obs::occupation(sr.rho) - ss.occupation()) /
                    ss.occupation(),
                std::abs(obs::g2_zero(sr.rho) - ss.g2()) / ss.g2());
  }

  {
    double wall = 0.0;
    auto p = paper(8.0);
    auto rows = tebd_run(p, std::polar(2.5, -0.37 * M_PI), 61, 20, 36, 1e-2,
                         2.0, 200, &wall);
    std::printf("C7-style run E=8 coherent(2.5): wall %.1f s, end g2 %.4f n "
                "%.4f\n",
                wall, rows.back().g2, rows.back().n);
  }
  return 0;
}
