#pragma once

// Exact quantum steady state of the driven dissipative Kerr oscillator:
// normally-ordered moments from a complex-parameter generalized
// hypergeometric ratio, the number-basis density matrix reconstructed from
// those moments, and the steady-state Wigner function as a power series.
// Series are summed in >= 50-digit complex arithmetic; double precision
// suffers catastrophic cancellation at strong drive.

#include "kerrcav/model.hpp"
#include "kerrcav/observables.hpp"
#include "kerrcav/wigner.hpp"

#include <boost/multiprecision/cpp_complex.hpp>

#include <vector>

namespace kerrcav::closed_form {

using cxd = std::complex<double>;
using mpc50 = boost::multiprecision::cpp_complex_50;
using mpc100 = boost::multiprecision::cpp_complex_100;

// 0F2(;b1,b2;z) = sum_k z^k / (k! (b1)_k (b2)_k), summed until 50
// consecutive terms fall below 1e-35 of the running magnitude maximum.
// Throws on pole parameters (b a non-positive integer) and on
// non-convergence within 1e5 terms.
template <typename C>
C hyp0f2(const C& b1, const C& b2, const C& z);

extern template mpc50 hyp0f2<mpc50>(const mpc50&, const mpc50&, const mpc50&);
extern template mpc100 hyp0f2<mpc100>(const mpc100&, const mpc100&,
                                      const mpc100&);
extern template cxd hyp0f2<cxd>(const cxd&, const cxd&, const cxd&);

// Cached steady-state moment table and its derived quantities for one
// parameter point.  Requires a real positive drive and chi2 != 0.
// Extension of the internal caches is not thread-safe; ensure_order() can be
// used to pre-extend before read-only parallel evaluation.
class SteadyState {
 public:
  explicit SteadyState(const model::SystemParams& params);

  const model::SystemParams& params() const { return params_; }

  // normally-ordered steady moment; (0,0) is exactly 1 by construction
  cxd moment(int m, int n) const;

  // mean steady field (the (0,1) moment)
  cxd field() const { return moment(0, 1); }

  // steady occupation, real part of the (1,1) moment
  double occupation() const { return moment(1, 1).real(); }

  // steady g2(0); an imaginary residue above 1e-6 flags an error
  double g2() const;

  // number-basis density matrix of the steady state; inner alternating sums
  // truncated adaptively (last retained term < 1e-14 of the partial sum);
  // Hermitized; a trace deviating from 1 by more than 1e-4 throws
  obs::FockDensityMatrix density_matrix(int dim) const;

  // steady-state Wigner function from the moment power series with
  // per-point adaptive truncation (terms below 1e-12 of the accumulated
  // magnitude over 20 consecutive total orders).  Points whose cancellation
  // exhausts the working precision are flagged and recomputed through the
  // density-matrix displaced-parity path.
  wigner::WignerGrid wigner_series(const wigner::GridSpec& spec,
                                   int n_threads = 1) const;

  // default square window |Re alpha|, |Im alpha| <= sqrt(<n>) + 3
  wigner::GridSpec default_grid(int points = 101) const;

  // pre-extend the moment cache so subsequent reads are lock-free
  void ensure_order(int max_order) const;
  int max_cached_order() const;

 private:
  mpc50 moment_mp(int m, int n) const;
  // alpha-independent kernel sum_k (-2)^k/k! G^(k+m, k+n)
  mpc50 collapsed_kernel_mp(int m, int n) const;
  const mpc50& poch_p(int n) const;
  const mpc50& poch_q(int m) const;
  const mpc50& base_pow(int j) const;
  const mpc50& factorial(int k) const;
  // one Wigner point from the moment series; orders above max_order are
  // either computed (allow_extend) or reported as precision loss
  double wigner_point_series(cxd alpha, int max_order, bool allow_extend,
                             bool* precision_loss) const;
  int series_order_bound(double alpha_max) const;

  model::SystemParams params_;
  mpc50 p_, q_, z_, base_; // base = E/(i chi2)
  mpc50 f_denom_;          // 0F2(p, q, z)
  mutable std::vector<std::vector<mpc50>> g_cache_; // g_cache_[m][n]
  mutable std::vector<std::vector<char>> g_have_;
  mutable std::vector<std::vector<mpc50>> c_cache_; // collapsed kernels
  mutable std::vector<std::vector<char>> c_have_;
  mutable std::vector<mpc50> poch_p_cache_, poch_q_cache_;
  mutable std::vector<mpc50> base_pow_cache_, fact_cache_;
};

} // namespace kerrcav::closed_form
