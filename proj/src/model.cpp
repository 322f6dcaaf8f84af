#include "kerrcav/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kerrcav::model {

std::vector<std::string> SystemParams::validate() const {
  if (!(gamma > 0.0))
    throw std::invalid_argument("SystemParams: gamma must be > 0");
  if (!(cutoff > 0.0))
    throw std::invalid_argument("SystemParams: cutoff must be > 0");
  std::vector<std::string> warnings;
  if (cutoff < 5.0 * gamma)
    warnings.push_back(
        "cutoff " + std::to_string(cutoff) + " is below 5*gamma = " +
        std::to_string(5.0 * gamma) +
        "; the band edge sits close to the system line and finite-band "
        "effects will be visible");
  return warnings;
}

InitialState InitialState::make(double amplitude, double phase) {
  if (amplitude < 0.0)
    throw std::invalid_argument("InitialState: amplitude must be >= 0");
  double p = std::fmod(phase, 2.0 * std::numbers::pi);
  if (p <= -std::numbers::pi) p += 2.0 * std::numbers::pi;
  if (p > std::numbers::pi) p -= 2.0 * std::numbers::pi;
  return InitialState{amplitude, p};
}

void SimulationConfig::validate() const {
  if (n_sites < 2)
    throw std::invalid_argument("SimulationConfig: n_sites must be >= 2");
  if (local_dim < 2)
    throw std::invalid_argument("SimulationConfig: local_dim must be >= 2");
  if (bond_dim < 1)
    throw std::invalid_argument("SimulationConfig: bond_dim must be >= 1");
  if (!(dt > 0.0))
    throw std::invalid_argument("SimulationConfig: dt must be > 0");
  if (t_total != 0.0 && t_total < dt)
    throw std::invalid_argument(
        "SimulationConfig: t_total must be 0 (snapshot only) or >= dt");
  if (snapshot_stride < 1)
    throw std::invalid_argument(
        "SimulationConfig: snapshot_stride must be >= 1");
}

double semiclassical_drive_for_field(const SystemParams& p, double n) {
  if (n < 0.0)
    throw std::invalid_argument("semiclassical_drive_for_field: n must be >= 0");
  const double det = p.delta + 2.0 * p.chi2 * n;
  return n * (det * det + p.gamma * p.gamma / 4.0);
}

namespace {

double cubic_value(double a, double b, double c, double d, double x) {
  return ((a * x + b) * x + c) * x + d;
}

double cubic_derivative(double a, double b, double c, double x) {
  return (3.0 * a * x + 2.0 * b) * x + c;
}

// a couple of Newton iterations to polish an analytic root
double polish_root(double a, double b, double c, double d, double x) {
  for (int it = 0; it < 4; ++it) {
    const double f = cubic_value(a, b, c, d, x);
    const double df = cubic_derivative(a, b, c, x);
    if (df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// bracketing-scan root plus quadratic deflation, used if the closed-form
// path loses accuracy on extreme coefficients
std::vector<double> roots_by_deflation(double a, double b, double c, double d) {
  // the cubic is monotone outside the turning points; scan a generous range
  double lo = 0.0, hi = 1.0;
  while (cubic_value(a, b, c, d, hi) < 0.0 && hi < 1e9) hi *= 2.0;
  double x = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cubic_value(a, b, c, d, mid) >= 0.0)
      hi = mid;
    else
      lo = mid;
    x = 0.5 * (lo + hi);
  }
  x = polish_root(a, b, c, d, x);
  // deflate: a*n^3 + b*n^2 + c*n + d = (n - x)(a*n^2 + b2*n + c2)
  const double b2 = b + a * x;
  const double c2 = c + b2 * x;
  std::vector<double> roots{x};
  const double disc = b2 * b2 - 4.0 * a * c2;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    roots.push_back((-b2 + s) / (2.0 * a));
    roots.push_back((-b2 - s) / (2.0 * a));
  }
  return roots;
}

} // namespace

std::vector<double> semiclassical_branches(const SystemParams& p,
                                           double drive_sq) {
  if (drive_sq < 0.0)
    throw std::invalid_argument("semiclassical_branches: drive_sq must be >= 0");
  const double a = 4.0 * p.chi2 * p.chi2;
  const double b = 4.0 * p.delta * p.chi2;
  const double c = p.delta * p.delta + p.gamma * p.gamma / 4.0;
  const double d = -drive_sq;

  std::vector<double> roots;
  if (a == 0.0) {
    // linear cavity: single Lorentzian response root
    roots.push_back(drive_sq / c);
  } else {
    // discriminant classifies the root structure; tangency band is treated
    // as a double root
    const double t1 = 18.0 * a * b * c * d;
    const double t2 = -4.0 * b * b * b * d;
    const double t3 = b * b * c * c;
    const double t4 = -4.0 * a * c * c * c;
    const double t5 = -27.0 * a * a * d * d;
    const double disc = t1 + t2 + t3 + t4 + t5;
    const double disc_scale = std::abs(t1) + std::abs(t2) + std::abs(t3) +
                              std::abs(t4) + std::abs(t5);
    const double tol = 1e-8 * std::max(1.0, disc_scale);

    const double p2 = (3.0 * a * c - b * b) / (3.0 * a * a);
    const double q2 = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) /
                      (27.0 * a * a * a);
    const double shift = -b / (3.0 * a);

    bool tangency = false;
    if (disc > tol) {
      // three distinct real roots: trigonometric form
      const double m = 2.0 * std::sqrt(-p2 / 3.0);
      const double arg =
          std::clamp(3.0 * q2 / (p2 * m), -1.0, 1.0); // = cos(3 theta)
      const double theta = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k)
        roots.push_back(
            m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift);
    } else if (disc >= -tol) {
      // tangency: double root plus a simple one; Newton polishing is
      // ill-conditioned at the merged pair (f and f' vanish together), so
      // these roots are kept as produced by the closed form
      tangency = true;
      if (std::abs(p2) < 1e-14) {
        roots.push_back(shift); // triple root
      } else {
        // t^3 + p t + q = (t - s)^2 (t + 2s) with s = -3q/(2p)
        roots.push_back(-1.5 * q2 / p2 + shift);
        roots.push_back(3.0 * q2 / p2 + shift);
      }
    } else {
      // one real root: Cardano
      const double half_q = q2 / 2.0;
      const double inner = half_q * half_q + p2 * p2 * p2 / 27.0;
      const double s = std::sqrt(inner);
      const double u = std::cbrt(-half_q + s);
      const double v = std::cbrt(-half_q - s);
      roots.push_back(u + v + shift);
    }

    // verify; fall back to scan + deflation if the closed form drifted
    if (!tangency) {
      bool ok = true;
      for (double& r : roots) {
        r = polish_root(a, b, c, d, r);
        const double scale = std::abs(a * r * r * r) + std::abs(b * r * r) +
                             std::abs(c * r) + std::abs(d) + 1.0;
        if (std::abs(cubic_value(a, b, c, d, r)) > 1e-7 * scale) ok = false;
      }
      if (!ok) roots = roots_by_deflation(a, b, c, d);
    }
  }

  std::vector<double> out;
  for (double r : roots) {
    if (r >= -1e-12) out.push_back(std::max(0.0, r));
  }
  std::sort(out.begin(), out.end());
  // collapse numerically coincident tangency duplicates
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) {
                          return std::abs(x - y) <=
                                 1e-9 * std::max(1.0, std::abs(x));
                        }),
            out.end());
  return out;
}

bool is_bistable(const SystemParams& p) {
  return p.delta < -p.gamma * std::sqrt(3.0) / 2.0;
}

} // namespace kerrcav::model
