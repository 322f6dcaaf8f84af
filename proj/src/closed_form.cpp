#include "kerrcav/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kerrcav::closed_form {

namespace {

inline double to_double(double v) { return v; }

template <typename T>
double to_double(const T& v) {
  return v.template convert_to<double>();
}

template <typename C>
bool near_nonpositive_integer(const C& b) {
  const double re = to_double(b.real());
  const double im = to_double(b.imag());
  if (std::abs(im) > 1e-12 * (1.0 + std::abs(re))) return false;
  const double r = std::round(re);
  return r <= 0.5 && std::abs(re - r) <= 1e-9 * (1.0 + std::abs(re));
}

} // namespace

// ---- generalized hypergeometric series ----

template <typename C>
C hyp0f2(const C& b1, const C& b2, const C& z) {
  if (near_nonpositive_integer(b1) || near_nonpositive_integer(b2)) {
    throw std::invalid_argument(
        "hyp0f2: lower parameter at a non-positive integer pole");
  }
  using R = decltype(abs(std::declval<C>()));
  C term(1.0);
  C sum(1.0);
  R run_max = abs(sum);
  const R ratio = R(1e-35);
  int consecutive = 0;
  for (long k = 0; k < 100000; ++k) {
    const double kd = static_cast<double>(k);
    term = term * z / ((b1 + C(kd)) * (b2 + C(kd)) * C(kd + 1.0));
    sum += term;
    const R tmag = abs(term);
    const R smag = abs(sum);
    if (smag > run_max) run_max = smag;
    if (tmag > run_max) run_max = tmag;
    if (tmag < ratio * run_max) {
      if (++consecutive >= 50) return sum;
    } else {
      consecutive = 0;
    }
  }
  throw std::runtime_error("hyp0f2: series did not converge within 1e5 terms");
}

template mpc50 hyp0f2<mpc50>(const mpc50&, const mpc50&, const mpc50&);
template mpc100 hyp0f2<mpc100>(const mpc100&, const mpc100&, const mpc100&);
template cxd hyp0f2<cxd>(const cxd&, const cxd&, const cxd&);

// ---- steady-state moment table ----

SteadyState::SteadyState(const model::SystemParams& params) : params_(params) {
  params_.validate();
  if (params_.chi2 == 0.0) {
    throw std::invalid_argument(
        "closed-form steady state requires a nonzero Kerr coefficient");
  }
  if (params_.drive.imag() != 0.0 || params_.drive.real() <= 0.0) {
    throw std::invalid_argument(
        "closed-form steady state requires a real positive drive amplitude");
  }
  const double e_over_chi = params_.drive.real() / params_.chi2;
  p_ = mpc50(params_.delta / params_.chi2, -params_.gamma / (2.0 * params_.chi2));
  q_ = mpc50(params_.delta / params_.chi2, params_.gamma / (2.0 * params_.chi2));
  z_ = mpc50(2.0 * e_over_chi * e_over_chi, 0.0);
  base_ = mpc50(0.0, -e_over_chi);
  f_denom_ = hyp0f2(p_, q_, z_);
  poch_p_cache_.push_back(mpc50(1.0));
  poch_q_cache_.push_back(mpc50(1.0));
  base_pow_cache_.push_back(mpc50(1.0));
  fact_cache_.push_back(mpc50(1.0));
}

const mpc50& SteadyState::poch_p(int n) const {
  while (static_cast<int>(poch_p_cache_.size()) <= n) {
    const double k = static_cast<double>(poch_p_cache_.size()) - 1.0;
    poch_p_cache_.push_back(poch_p_cache_.back() * (p_ + mpc50(k)));
  }
  return poch_p_cache_[static_cast<std::size_t>(n)];
}

const mpc50& SteadyState::poch_q(int m) const {
  while (static_cast<int>(poch_q_cache_.size()) <= m) {
    const double k = static_cast<double>(poch_q_cache_.size()) - 1.0;
    poch_q_cache_.push_back(poch_q_cache_.back() * (q_ + mpc50(k)));
  }
  return poch_q_cache_[static_cast<std::size_t>(m)];
}

const mpc50& SteadyState::base_pow(int j) const {
  while (static_cast<int>(base_pow_cache_.size()) <= j) {
    base_pow_cache_.push_back(base_pow_cache_.back() * base_);
  }
  return base_pow_cache_[static_cast<std::size_t>(j)];
}

const mpc50& SteadyState::factorial(int k) const {
  while (static_cast<int>(fact_cache_.size()) <= k) {
    const double j = static_cast<double>(fact_cache_.size());
    fact_cache_.push_back(fact_cache_.back() * mpc50(j));
  }
  return fact_cache_[static_cast<std::size_t>(k)];
}

mpc50 SteadyState::moment_mp(int m, int n) const {
  if (m < 0 || n < 0) throw std::invalid_argument("moment indices must be >= 0");
  if (static_cast<int>(g_cache_.size()) <= m) {
    g_cache_.resize(static_cast<std::size_t>(m) + 1);
    g_have_.resize(static_cast<std::size_t>(m) + 1);
  }
  auto& row = g_cache_[static_cast<std::size_t>(m)];
  auto& have = g_have_[static_cast<std::size_t>(m)];
  if (static_cast<int>(row.size()) <= n) {
    row.resize(static_cast<std::size_t>(n) + 1);
    have.resize(static_cast<std::size_t>(n) + 1, 0);
  }
  if (!have[static_cast<std::size_t>(n)]) {
    mpc50 val;
    if (m == 0 && n == 0) {
      val = mpc50(1.0);
    } else {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const mpc50 numer = hyp0f2(p_ + mpc50(static_cast<double>(n)),
                                 q_ + mpc50(static_cast<double>(m)), z_);
      val = mpc50(sign) * base_pow(m + n) / (poch_p(n) * poch_q(m)) * numer /
            f_denom_;
    }
    row[static_cast<std::size_t>(n)] = val;
    have[static_cast<std::size_t>(n)] = 1;
  }
  return row[static_cast<std::size_t>(n)];
}

cxd SteadyState::moment(int m, int n) const {
  const mpc50 g = moment_mp(m, n);
  return cxd(to_double(g.real()), to_double(g.imag()));
}

void SteadyState::ensure_order(int max_order) const {
  for (int m = 0; m <= max_order; ++m) {
    for (int n = 0; n <= max_order; ++n) moment_mp(m, n);
  }
}

int SteadyState::max_cached_order() const {
  int order = -1;
  for (std::size_t m = 0; m < g_have_.size(); ++m) {
    for (std::size_t n = 0; n < g_have_[m].size(); ++n) {
      if (g_have_[m][n]) {
        const int o = static_cast<int>(std::max(m, n));
        if (o > order) order = o;
      }
    }
  }
  return order;
}

double SteadyState::g2() const {
  const mpc50 g11 = moment_mp(1, 1);
  const mpc50 g22 = moment_mp(2, 2);
  const double n_mean = to_double(g11.real());
  if (n_mean <= 1e-12) {
    throw std::runtime_error(
        "g2 undefined: steady occupation at or below 1e-12");
  }
  const mpc50 val = g22 / (g11 * g11);
  const double imag = to_double(val.imag());
  if (std::abs(imag) > 1e-6) {
    throw std::runtime_error(
        "g2 evaluation left an imaginary residue above 1e-6; "
        "moment table is inconsistent");
  }
  return to_double(val.real());
}

// ---- number-basis density matrix ----

obs::FockDensityMatrix SteadyState::density_matrix(int dim) const {
  if (dim < 1) throw std::invalid_argument("density matrix dimension must be >= 1");
  using real_t = mpc50::value_type;
  Eigen::MatrixXcd rho(dim, dim);
  const int r_max = 400;
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m <= n; ++m) {
      mpc50 sum(0.0);
      real_t max_sum(0);
      bool converged = false;
      for (int r = 0; r < r_max; ++r) {
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        const mpc50 term =
            mpc50(sign) * moment_mp(m + r, n + r) / factorial(r);
        sum += term;
        const real_t smag = abs(sum);
        if (smag > max_sum) max_sum = smag;
        if (r >= 4 && abs(term) < real_t(1e-14) * max_sum) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        throw std::runtime_error(
            "density matrix reconstruction did not converge; "
            "reduce the dimension or check the parameter regime");
      }
      const mpc50 norm = sqrt(factorial(n) * factorial(m));
      const mpc50 val = sum / norm;
      rho(n, m) = cxd(to_double(val.real()), to_double(val.imag()));
    }
  }
  for (int n = 0; n < dim; ++n) {
    for (int m = n + 1; m < dim; ++m) rho(n, m) = std::conj(rho(m, n));
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-4) {
    throw std::runtime_error(
        "reconstructed density matrix trace deviates from 1 by more than "
        "1e-4; increase the dimension");
  }
  obs::FockDensityMatrix out;
  out.mat = std::move(rho);
  return out;
}

// ---- Wigner function from the moment series ----

mpc50 SteadyState::collapsed_kernel_mp(int m, int n) const {
  if (static_cast<int>(c_cache_.size()) <= m) {
    c_cache_.resize(static_cast<std::size_t>(m) + 1);
    c_have_.resize(static_cast<std::size_t>(m) + 1);
  }
  auto& row = c_cache_[static_cast<std::size_t>(m)];
  auto& have = c_have_[static_cast<std::size_t>(m)];
  if (static_cast<int>(row.size()) <= n) {
    row.resize(static_cast<std::size_t>(n) + 1);
    have.resize(static_cast<std::size_t>(n) + 1, 0);
  }
  if (!have[static_cast<std::size_t>(n)]) {
    using real_t = mpc50::value_type;
    mpc50 sum(0.0);
    mpc50 pow_m2(1.0); // (-2)^k
    real_t max_mag(0);
    int consecutive = 0;
    for (int k = 0; k < 400; ++k) {
      const mpc50 t = pow_m2 * moment_mp(k + m, k + n) / factorial(k);
      sum += t;
      const real_t tmag = abs(t);
      const real_t smag = abs(sum);
      if (tmag > max_mag) max_mag = tmag;
      if (smag > max_mag) max_mag = smag;
      if (k >= 4 && tmag < real_t(1e-38) * max_mag) {
        if (++consecutive >= 6) break;
      } else {
        consecutive = 0;
      }
      pow_m2 *= mpc50(-2.0);
    }
    row[static_cast<std::size_t>(n)] = sum;
    have[static_cast<std::size_t>(n)] = 1;
  }
  return row[static_cast<std::size_t>(n)];
}

int SteadyState::series_order_bound(double alpha_max) const {
  const double c = std::max(1.0, std::abs(to_double(base_.imag())));
  const double lead = std::log(std::max(2.0 * alpha_max * c, std::exp(1.0)));
  const double target = -(2.0 * alpha_max * alpha_max + 80.0);
  for (int s = 20; s < 2000; ++s) {
    const double f = s * lead - 4.0 * std::lgamma(0.5 * s + 1.0);
    if (f < target) return std::min(std::max(s + 40, 120), 2000);
  }
  return 2000;
}

double SteadyState::wigner_point_series(cxd alpha, int max_order,
                                        bool allow_extend,
                                        bool* precision_loss) const {
  using real_t = mpc50::value_type;
  const mpc50 ax(2.0 * alpha.real(), 2.0 * alpha.imag());
  const mpc50 ay(2.0 * alpha.real(), -2.0 * alpha.imag());
  std::vector<mpc50> u, v; // u[m] = (2 alpha)^m / m!, v[n] = conj analogue
  u.reserve(static_cast<std::size_t>(max_order) + 1);
  v.reserve(static_cast<std::size_t>(max_order) + 1);
  u.push_back(mpc50(1.0));
  v.push_back(mpc50(1.0));
  for (int j = 1; j <= max_order; ++j) {
    const mpc50 jd(static_cast<double>(j));
    u.push_back(u.back() * ax / jd);
    v.push_back(v.back() * ay / jd);
  }

  mpc50 sum(0.0);
  real_t run_max(0);
  real_t spike_max(0);
  int consecutive = 0;
  bool converged = false;
  for (int s = 0; s <= max_order; ++s) {
    if (!allow_extend) {
      const bool have_all =
          static_cast<int>(c_cache_.size()) > s &&
          static_cast<int>(c_cache_[0].size()) > s;
      if (!have_all) break;
    }
    real_t order_max(0);
    for (int m = 0; m <= s; ++m) {
      const int n = s - m;
      const mpc50 term =
          u[static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(n)] *
          collapsed_kernel_mp(m, n);
      sum += term;
      const real_t tmag = abs(term);
      if (tmag > order_max) order_max = tmag;
      if (tmag > spike_max) spike_max = tmag;
    }
    const real_t smag = abs(sum);
    if (smag > run_max) run_max = smag;
    if (order_max < real_t(1e-12) * run_max) {
      if (++consecutive >= 20) {
        converged = true;
        break;
      }
    } else {
      consecutive = 0;
    }
  }

  const double sum_re = to_double(sum.real());
  const double sum_mag = std::abs(
      cxd(sum_re, to_double(sum.imag())));
  const double peak =
      std::max(to_double(run_max), to_double(spike_max));
  bool loss = !converged;
  if (peak > 1e35 * std::max(sum_mag, 1e-300)) loss = true;
  if (!std::isfinite(sum_re) || !std::isfinite(peak)) loss = true;
  if (precision_loss != nullptr) *precision_loss = loss;
  if (!std::isfinite(sum_re)) return 0.0;
  const double a2 = std::norm(alpha);
  return (2.0 / M_PI) * std::exp(-2.0 * a2) * sum_re;
}

wigner::GridSpec SteadyState::default_grid(int points) const {
  const double half = std::sqrt(std::max(occupation(), 0.0)) + 3.0;
  wigner::GridSpec spec;
  spec.x_min = -half;
  spec.x_max = half;
  spec.p_min = -half;
  spec.p_max = half;
  spec.nx = points;
  spec.np = points;
  spec.validate();
  return spec;
}

wigner::WignerGrid SteadyState::wigner_series(const wigner::GridSpec& spec,
                                              int n_threads) const {
  spec.validate();
  const double alpha_max = spec.corner_radius();
  const int cap = series_order_bound(alpha_max);

  // serial pre-pass over the extremal points extends the kernel cache to the
  // highest order any grid point can need; the grid pass is then read-only
  // and safe to partition across threads (results are partition independent)
  const double xs[3] = {spec.x_min, 0.5 * (spec.x_min + spec.x_max), spec.x_max};
  const double ps[3] = {spec.p_min, 0.5 * (spec.p_min + spec.p_max), spec.p_max};
  bool scratch = false;
  for (double x : xs) {
    for (double p : ps) {
      (void)wigner_point_series(cxd(x, p), cap, true, &scratch);
    }
  }
  // kernels, not raw moments, bound the usable order
  int kernel_order = -1;
  for (std::size_t m = 0; m < c_have_.size(); ++m) {
    for (std::size_t n = 0; n < c_have_[m].size(); ++n) {
      if (c_have_[m][n]) {
        const int o = static_cast<int>(std::max(m, n));
        if (o > kernel_order) kernel_order = o;
      }
    }
  }
  const int frozen_order = std::min(kernel_order + 10, cap);
  for (int m = 0; m <= frozen_order; ++m) {
    for (int n = 0; n <= frozen_order; ++n) (void)collapsed_kernel_mp(m, n);
  }

  wigner::WignerGrid grid;
  grid.spec = spec;
  grid.time = 0.0;
  grid.values.resize(spec.np, spec.nx);
  Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> lost(spec.np, spec.nx);
  lost.setZero();

  const int workers = std::max(1, n_threads);
  auto run_rows = [&](int j_begin, int j_end) {
    for (int j = j_begin; j < j_end; ++j) {
      const double p = grid.spec.p_at(j);
      for (int i = 0; i < spec.nx; ++i) {
        bool point_loss = false;
        grid.values(j, i) = wigner_point_series(
            cxd(grid.spec.x_at(i), p), frozen_order, false, &point_loss);
        if (point_loss) lost(j, i) = 1;
      }
    }
  };
  if (workers == 1) {
    run_rows(0, spec.np);
  } else {
    std::vector<std::thread> pool;
    const int rows_per = (spec.np + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int j0 = w * rows_per;
      const int j1 = std::min(spec.np, j0 + rows_per);
      if (j0 >= j1) break;
      pool.emplace_back(run_rows, j0, j1);
    }
    for (auto& t : pool) t.join();
  }

  // recompute points that exhausted the working precision through the
  // displaced-parity route on the reconstructed density matrix
  const long n_lost = static_cast<long>(lost.cast<int>().sum());
  grid.fallback_points = static_cast<int>(n_lost);
  if (n_lost > 0) {
    const double n_mean = occupation();
    const int dim = std::max(
        24, static_cast<int>(std::ceil(n_mean + 10.0 * std::sqrt(n_mean) + 12.0)));
    const obs::FockDensityMatrix rho = density_matrix(dim);
    for (int j = 0; j < spec.np; ++j) {
      for (int i = 0; i < spec.nx; ++i) {
        if (lost(j, i)) {
          grid.values(j, i) = wigner::displaced_parity_point(
              rho, cxd(grid.spec.x_at(i), grid.spec.p_at(j)));
        }
      }
    }
  }

  // support check: three standard deviations of the occupation must fit
  // inside the largest inscribed radius of the window
  const double n_mean = occupation();
  const double n2 = moment(2, 2).real() + n_mean;
  const double var = std::max(n2 - n_mean * n_mean, 0.0);
  const double r_in = std::min(
      std::min(spec.x_max, -spec.x_min), std::min(spec.p_max, -spec.p_min));
  grid.support_warning =
      r_in <= 0.0 || (n_mean + 3.0 * std::sqrt(var) > r_in * r_in);
  return grid;
}

} // namespace kerrcav::closed_form
