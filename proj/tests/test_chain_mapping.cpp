// Chain mapping of the flat hard-cutoff band: for spectral weight gamma/(2*pi)
// uniform on [-cutoff, cutoff], the orthogonal-polynomial construction gives
//
//   eta_sys     = sqrt(gamma * cutoff / pi)
//   site_freqs  = 0 exactly (symmetric band)
//   hoppings[n] = cutoff * (n+1) / sqrt((2n+1)(2n+3))
//
// The hoppings decrease strictly to cutoff/2 from above; the bound
// hoppings[n] - cutoff/2 <= cutoff / (2(2n+1)(2n+3)) follows from the
// Legendre recurrence coefficients.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kerrcav/chain_mapping.hpp"

#include <cmath>

using namespace kerrcav;

namespace {

model::SystemParams reference_params() {
  model::SystemParams p;
  p.delta = -12.0;
  p.chi2 = 1.5;
  p.gamma = 6.28;
  p.drive = {1.0, 0.0};
  p.cutoff = 60.0;
  return p;
}

} // namespace

TEST_CASE("system coupling and shape for the reference band") {
  const auto cc = chain::build_chain(reference_params(), 61);
  // sqrt(6.28 * 60 / pi) to 16 digits
  CHECK(cc.eta_sys == doctest::Approx(10.95167407815135).epsilon(1e-14));
  CHECK(cc.site_freqs.size() == 60);
  CHECK(cc.hoppings.size() == 59);
  for (double w : cc.site_freqs) CHECK(w == 0.0);
}

TEST_CASE("hoppings follow the closed-form Legendre ratio") {
  const auto cc = chain::build_chain(reference_params(), 61);
  const double wc = 60.0;
  for (std::size_t n = 0; n < cc.hoppings.size(); ++n) {
    const double expected =
        wc * (static_cast<double>(n) + 1.0) /
        std::sqrt((2.0 * static_cast<double>(n) + 1.0) *
                  (2.0 * static_cast<double>(n) + 3.0));
    CHECK(cc.hoppings[n] == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(cc.hoppings[0] == doctest::Approx(wc / std::sqrt(3.0)).epsilon(1e-14));
  // deep-chain value, frozen from the formula at n = 58
  CHECK(cc.hoppings[58] == doctest::Approx(30.00107733467436).epsilon(1e-13));
}

TEST_CASE("hoppings decrease strictly to cutoff/2 within the stated bound") {
  const auto cc = chain::build_chain(reference_params(), 200);
  const double half = 30.0;
  for (std::size_t n = 0; n + 1 < cc.hoppings.size(); ++n) {
    CHECK(cc.hoppings[n] > cc.hoppings[n + 1]);
  }
  for (std::size_t n = 0; n < cc.hoppings.size(); ++n) {
    const double excess = cc.hoppings[n] - half;
    const double bound = 60.0 / (2.0 * (2.0 * static_cast<double>(n) + 1.0) *
                                 (2.0 * static_cast<double>(n) + 3.0));
    CHECK(excess > 0.0);
    CHECK(excess <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("recurrence horizon grows linearly with the chain") {
  const auto c61 = chain::build_chain(reference_params(), 61);
  CHECK(c61.recurrence_time == doctest::Approx(61.0 / 60.0).epsilon(1e-14));
  const auto c121 = chain::build_chain(reference_params(), 121);
  CHECK(c121.recurrence_time == doctest::Approx(121.0 / 60.0).epsilon(1e-14));
  CHECK(c121.recurrence_time > c61.recurrence_time);
}

TEST_CASE("coupling scales as sqrt(gamma * cutoff)") {
  model::SystemParams p = reference_params();
  const auto base = chain::build_chain(p, 10);
  p.gamma *= 4.0;
  const auto g4 = chain::build_chain(p, 10);
  CHECK(g4.eta_sys == doctest::Approx(2.0 * base.eta_sys).epsilon(1e-14));
  p.gamma = reference_params().gamma;
  p.cutoff *= 9.0;
  const auto w9 = chain::build_chain(p, 10);
  CHECK(w9.eta_sys == doctest::Approx(3.0 * base.eta_sys).epsilon(1e-14));
}

TEST_CASE("chain construction rejects short chains and bad parameters") {
  CHECK_THROWS_AS(chain::build_chain(reference_params(), 1),
                  std::invalid_argument);
  model::SystemParams p = reference_params();
  p.gamma = 0.0;
  CHECK_THROWS_AS(chain::build_chain(p, 10), std::invalid_argument);
}

TEST_CASE("scaled Legendre modes are orthonormal under quadrature") {
  // exact Gauss-Legendre integration of degree-2n products needs n+1 nodes
  CHECK(chain::verify_legendre_orthonormality(20, 40) < 1e-12);
  CHECK(chain::verify_legendre_orthonormality(60, 80) < 1e-11);
  CHECK(chain::verify_legendre_orthonormality(5, 6, 1.0) < 1e-13);
  CHECK_THROWS_AS(chain::verify_legendre_orthonormality(20, 20),
                  std::invalid_argument);
}
