#include "kerrcav/closed_form.hpp"
#include "kerrcav/model.hpp"
#include "kerrcav/observables.hpp"
#include "kerrcav/wigner.hpp"

#include <algorithm>
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

struct Peak {
  int i, j;
  double w;
};

static std::vector<Peak> find_peaks(const wigner::WignerGrid& g) {
  std::vector<Peak> out;
  const auto& v = g.values;
  double wmax = v.maxCoeff();
  double thresh = 0.01 * wmax;
  for (int j = 1; j + 1 < v.rows(); ++j)
    for (int i = 1; i + 1 < v.cols(); ++i) {
      double c = v(j, i);
      if (c < thresh) continue;
      bool top = true;
      for (int dj = -1; dj <= 1 && top; ++dj)
        for (int di = -1; di <= 1 && top; ++di) {
          if (di == 0 && dj == 0) continue;
          if (v(j + dj, i + di) >= c) top = false;
        }
      if (top) out.push_back({i, j, c});
    }
  std::sort(out.begin(), out.end(),
            [](const Peak& a, const Peak& b) { return a.w > b.w; });
  return out;
}

static double line_min(const wigner::WignerGrid& g, const Peak& a,
                       const Peak& b) {
  // min of bilinear interpolation along the straight segment between peaks
  double lo = 1e300;
  for (int s = 0; s <= 200; ++s) {
    double f = s / 200.0;
    double x = g.spec.x_at(a.i) + f * (g.spec.x_at(b.i) - g.spec.x_at(a.i));
    double p = g.spec.p_at(a.j) + f * (g.spec.p_at(b.j) - g.spec.p_at(a.j));
    double fi = (x - g.spec.x_min) / g.spec.dx();
    double fj = (p - g.spec.p_min) / g.spec.dp();
    int i0 = std::clamp(static_cast<int>(fi), 0, g.spec.nx - 2);
    int j0 = std::clamp(static_cast<int>(fj), 0, g.spec.np - 2);
    double u = fi - i0, v = fj - j0;
    double w = (1 - u) * (1 - v) * g.values(j0, i0) +
               u * (1 - v) * g.values(j0, i0 + 1) +
               (1 - u) * v * g.values(j0 + 1, i0) +
               u * v * g.values(j0 + 1, i0 + 1);
    lo = std::min(lo, w);
  }
  return lo;
}

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);

  // semiclassical three-root window by scan + bisection
  auto n_roots = [](double e) {
    auto p = paper(e);
    return model::semiclassical_branches(p, e * e).size();
  };
  double lo = 0.5, hi = 25.0, e_lo = 0, e_hi = 0;
  {
    double a = lo;
    while (a < hi && n_roots(a) < 3) a += 1e-3;
    double l = a - 1e-3, r = a;
    for (int k = 0; k < 60; ++k) {
      double m = 0.5 * (l + r);
      (n_roots(m) >= 3 ? r : l) = m;
    }
    e_lo = r;
    a = hi;
    while (a > lo && n_roots(a) < 3) a -= 1e-3;
    l = a, r = a + 1e-3;
    for (int k = 0; k < 60; ++k) {
      double m = 0.5 * (l + r);
      (n_roots(m) >= 3 ? l : r) = m;
    }
    e_hi = l;
  }
  std::printf("three-root window: [%.9f, %.9f]\n", e_lo, e_hi);

  // steady-curve structure over E in [0.5, 25]
  {
    int n = 99;
    std::vector<double> es(n), f(n);
    for (int i = 0; i < n; ++i) {
      es[i] = 0.5 + (25.0 - 0.5) * i / (n - 1);
      closed_form::SteadyState ss(paper(es[i]));
      f[i] = std::abs(ss.field());
    }
    bool mono = true;
    int i_steep = 0;
    double steep = 0.0;
    for (int i = 1; i < n; ++i) {
      if (f[i] <= f[i - 1]) mono = false;
      double sl = (f[i] - f[i - 1]) / (es[i] - es[i - 1]);
      if (sl > steep) {
        steep = sl;
        i_steep = i;
      }
    }
    double e_steep = 0.5 * (es[i_steep] + es[i_steep - 1]);
    std::printf("|alpha|(E): mono %d steepest at E %.4f (slope %.4f) inside "
                "window %d\n",
                mono ? 1 : 0, e_steep, steep,
                (e_steep > e_lo && e_steep < e_hi) ? 1 : 0);
  }

  // g2 over 30-point grid
  {
    int n = 30;
    double best = -1, e_best = 0, g1 = 0, g20 = 0;
    for (int i = 0; i < n; ++i) {
      double e = 0.5 + (25.0 - 0.5) * i / (n - 1);
      closed_form::SteadyState ss(paper(e));
      double g = ss.g2();
      if (g > best) {
        best = g;
        e_best = e;
      }
    }
    g1 = closed_form::SteadyState(paper(1.0)).g2();
    g20 = closed_form::SteadyState(paper(20.0)).g2();
    std::printf("g2(1) %.4f g2(20) %.4f peak %.4f at E %.4f inside %d\n", g1,
                g20, best, e_best, (e_best > e_lo && e_best < e_hi) ? 1 : 0);
  }

  // Wigner humps at the four drives
  double half[4] = {0, 0, 0, 0};
  double drives[4] = {1.0, 8.0, 10.0, 20.0};
  for (int k = 0; k < 4; ++k) {
    closed_form::SteadyState ss(paper(drives[k]));
    double nbar = ss.occupation();
    double hw = std::sqrt(nbar) + 3.0;
    half[k] = hw;
    auto t0 = std::chrono::steady_clock::now();
    auto g = ss.wigner_series(wigner::GridSpec::square(hw, 101));
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    auto peaks = find_peaks(g);
    std::printf("E=%g hw %.2f peaks %zu wall %.1f s norm %.6f fallback %d:",
                drives[k], hw, peaks.size(), wall, g.normalization(),
                g.fallback_points);
    for (auto& pk : peaks)
      std::printf(" (%.3f,%.3f)W=%.4f", g.spec.x_at(pk.i), g.spec.p_at(pk.j),
                  pk.w);
    if (peaks.size() >= 2) {
      double saddle = line_min(g, peaks[0], peaks[1]);
      std::printf("  saddle %.4f vs lower*0.9 %.4f pass %d", saddle,
                  0.9 * peaks[1].w, saddle <= 0.9 * peaks[1].w ? 1 : 0);
    }
    std::printf("\n");
  }

  // series vs displaced-parity pointwise at E=1 (grid route), timing
  {
    closed_form::SteadyState ss(paper(1.0));
    auto spec = wigner::GridSpec::square(half[0], 101);
    auto gs = ss.wigner_series(spec);
    auto rho = ss.density_matrix(24);
    auto t0 = std::chrono::steady_clock::now();
    auto gp = wigner::displaced_parity_grid(rho, spec, 1);
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    double dmax = (gs.values - gp.values).cwiseAbs().maxCoeff();
    std::printf("E=1 series-vs-parity grid 101^2: max|dW| %.3e wall %.1f s\n",
                dmax, wall);
  }
  return 0;
}
