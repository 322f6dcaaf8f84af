#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kerrcav/fock.hpp"
#include "kerrcav/mps.hpp"

#include <complex>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace kerrcav;
using mps::MPSState;
using cxd = std::complex<double>;

namespace {

// brute-force statevector of a small chain: amplitude(p0..p_{N-1}) is the
// scalar product Gamma0(p0) diag(l0) Gamma1(p1) ... Gamma_{N-1}(p_{N-1})
Eigen::VectorXcd dense_state(const MPSState& st) {
  const int n = st.n_sites();
  const int m = st.phys_dim();
  long total = 1;
  for (int i = 0; i < n; ++i) total *= m;
  Eigen::VectorXcd psi(total);
  std::vector<int> p(static_cast<std::size_t>(n), 0);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int i = n - 1; i >= 0; --i) {
      p[static_cast<std::size_t>(i)] = static_cast<int>(rem % m);
      rem /= m;
    }
    Eigen::MatrixXcd acc = st.site(0).slice(p[0]);
    for (int i = 1; i < n; ++i) {
      acc = acc * st.bond(i - 1).asDiagonal();
      acc = acc * st.site(i).slice(p[static_cast<std::size_t>(i)]);
    }
    psi(idx) = acc(0, 0);
  }
  return psi;
}

// reduced density matrix of one site from the dense statevector
Eigen::MatrixXcd dense_site_rdm(const Eigen::VectorXcd& psi, int n, int m,
                                int site) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(m, m);
  long right = 1;
  for (int i = site + 1; i < n; ++i) right *= m;
  long left = 1;
  for (int i = 0; i < site; ++i) left *= m;
  for (long l = 0; l < left; ++l)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (long r = 0; r < right; ++r)
          rho(a, b) += psi((l * m + a) * right + r) *
                       std::conj(psi((l * m + b) * right + r));
  return rho;
}

MPSState random_chain(unsigned seed) {
  // non-canonical by construction: random tensors and arbitrary positive
  // bond vectors on a 4-site chain with bond dimensions 2, 3, 2
  MPSState st = MPSState::vacuum(4, 2);
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 1.0);
  const int dims[5] = {1, 2, 3, 2, 1};
  for (int i = 0; i < 4; ++i) {
    mps::Tensor3 t(dims[i], 2, dims[i + 1]);
    for (long k = 0; k < t.data.size(); ++k)
      t.data(k) = cxd(gauss(rng), gauss(rng));
    st.site(i) = t;
    st.mark_active(i);
  }
  for (int b = 0; b < 3; ++b) {
    Eigen::VectorXd lam(dims[b + 1]);
    for (int k = 0; k < lam.size(); ++k) lam(k) = pos(rng);
    st.bond(b) = lam;
  }
  return st;
}

} // namespace

TEST_CASE("vacuum chain: trivial bonds, unit norm, clean gauge") {
  const auto st = MPSState::vacuum(5, 3);
  CHECK(st.n_sites() == 5);
  CHECK(st.phys_dim() == 3);
  CHECK(st.max_bond_dim() == 1);
  for (int b = 0; b < 4; ++b) {
    REQUIRE(st.bond_dim(b) == 1);
    CHECK(st.bond(b)(0) == 1.0);
  }
  for (int i = 0; i < 5; ++i) CHECK(st.near_vacuum(i));
  CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.canonical_defect() < 1e-15);

  const auto rho = st.site_density_matrix(2);
  CHECK(rho(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(rho(1, 1)) < 1e-15);

  CHECK_THROWS_AS(MPSState::vacuum(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(MPSState::vacuum(4, 1), std::invalid_argument);
}

TEST_CASE("coherent chain: oscillator site carries the amplitude") {
  const cxd alpha(1.1, -0.4);
  const int m = 16;
  const auto st = MPSState::coherent_system(6, m, alpha);
  CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.canonical_defect() < 1e-14);
  CHECK_FALSE(st.near_vacuum(0));
  for (int i = 1; i < 6; ++i) CHECK(st.near_vacuum(i));

  const Eigen::VectorXcd c = fock::coherent_vector(alpha, m);
  const auto rho = st.site_density_matrix(0);
  CHECK((rho - c * c.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 1; i < 6; ++i) {
    const auto bath = st.site_density_matrix(i);
    CHECK(bath(0, 0).real() == doctest::Approx(1.0));
  }

  // zero amplitude reduces to the vacuum constructor
  const auto z = MPSState::coherent_system(4, 8, cxd(0.0, 0.0));
  CHECK(z.near_vacuum(0));
  CHECK(z.norm_sq() == doctest::Approx(1.0));
}

TEST_CASE("coherent tail guard names a sufficient site dimension") {
  const cxd alpha(1.5, 0.5); // |alpha| about 1.58
  bool threw = false;
  int advertised = 0;
  try {
    MPSState::coherent_system(4, 12, alpha);
  } catch (const std::invalid_argument& ex) {
    threw = true;
    const std::string msg = ex.what();
    CHECK(msg.find("at least") != std::string::npos);
    advertised = std::stoi(msg.substr(msg.rfind(' ') + 1));
  }
  CHECK(threw);
  REQUIRE(advertised > 12);
  // the advertised dimension must actually pass the same gate
  CHECK_NOTHROW(MPSState::coherent_system(4, advertised, alpha));
}

TEST_CASE("squared norm matches the dense contraction with no gauge") {
  const auto st = random_chain(42);
  const Eigen::VectorXcd psi = dense_state(st);
  CHECK(st.norm_sq() == doctest::Approx(psi.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("gauge defect detects a broken representation and blocks readout") {
  auto st = MPSState::coherent_system(4, 10, cxd(0.9, 0.2));
  REQUIRE(st.canonical_defect() < 1e-14);
  // scaling one tensor destroys the isometry conditions
  st.site(1).data *= 2.0;
  CHECK(st.canonical_defect() > 1e-2);
  bool threw = false;
  try {
    (void)st.site_density_matrix(1);
  } catch (const std::runtime_error& ex) {
    threw = true;
    CHECK(std::string(ex.what()).find("re-orthogonalize") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("re-orthogonalization restores canonical form on the same ray") {
  auto st = random_chain(7);
  const Eigen::VectorXcd psi_ref = dense_state(st);
  const double nrm_ref = psi_ref.norm();
  REQUIRE(nrm_ref > 1e-6);
  REQUIRE(st.canonical_defect() > 1e-3); // genuinely non-canonical input

  st.re_orthogonalize(1e-12);
  CHECK(st.canonical_defect() < 1e-12);
  CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

  // same physical state up to normalization: unit overlap
  const Eigen::VectorXcd psi_new = dense_state(st);
  const double overlap =
      std::abs(psi_ref.dot(psi_new)) / (nrm_ref * psi_new.norm());
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-12));

  // every site density matrix agrees with the dense partial trace and
  // satisfies the state axioms
  for (int i = 0; i < st.n_sites(); ++i) {
    const Eigen::MatrixXcd rho = st.site_density_matrix(i);
    Eigen::MatrixXcd ref = dense_site_rdm(psi_ref, 4, 2, i);
    ref /= ref.trace().real();
    CHECK((rho - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                       Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-13);
  }

  // bond spectra are now genuine Schmidt coefficients: normalized weights
  for (int b = 0; b < st.n_sites() - 1; ++b)
    CHECK(st.bond(b).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted gauge metric stays finite when tiny Schmidt values are kept") {
  // a bond carrying a singular value near the floor must not blow up the
  // defect: the unweighted isometry residual scales like eps/lambda^2, but
  // the weighted metric bounds what a lambda^2-weighted contraction can see
  auto st = random_chain(3);
  st.re_orthogonalize(1e-12);
  // shrink the weakest Schmidt value toward the floor, renormalize, and
  // rebalance the neighbour tensor so the state stays exactly representable
  auto& lam = st.bond(1);
  const int last = static_cast<int>(lam.size()) - 1;
  const double old_val = lam(last);
  lam(last) = 1e-10;
  lam /= lam.norm();
  (void)old_val;
  st.re_orthogonalize(1e-12);
  double min_lambda = 1e300;
  for (int b = 0; b < st.n_sites() - 1; ++b)
    min_lambda = std::min(min_lambda, st.bond(b).minCoeff());
  REQUIRE(min_lambda < 1e-8); // the regime an unweighted metric cannot survive
  CHECK(st.canonical_defect() < 1e-10);
}

TEST_CASE("checkpoints round-trip bytes and reject corrupted input") {
  const std::string path = "/tmp/kerrcav_test_ckpt.bin";
  const std::string path2 = "/tmp/kerrcav_test_ckpt2.bin";

  auto st = random_chain(11);
  st.re_orthogonalize(1e-12);
  st.save(path);

  const MPSState back = MPSState::load(path);
  REQUIRE(back.n_sites() == st.n_sites());
  REQUIRE(back.phys_dim() == st.phys_dim());
  for (int b = 0; b < st.n_sites() - 1; ++b)
    CHECK((back.bond(b) - st.bond(b)).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < st.n_sites(); ++i)
    CHECK((back.site(i).data - st.site(i).data).cwiseAbs().maxCoeff() == 0.0);

  // saving the loaded state reproduces the file byte for byte
  back.save(path2);
  std::ifstream f1(path, std::ios::binary);
  std::ifstream f2(path2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(b1.size() > 8);
  CHECK(b1.compare(0, 8, "KCMPS01\n") == 0);

  // corrupted magic is refused
  {
    std::string bad = b1;
    bad[0] = 'X';
    std::ofstream out(path2, std::ios::binary);
    out.write(bad.data(), static_cast<long>(bad.size()));
  }
  CHECK_THROWS_WITH_AS(MPSState::load(path2),
                       doctest::Contains("not a state checkpoint"),
                       std::runtime_error);

  // truncated payload is refused
  {
    std::ofstream out(path2, std::ios::binary);
    out.write(b1.data(), static_cast<long>(b1.size() / 2));
  }
  CHECK_THROWS_AS(MPSState::load(path2), std::runtime_error);

  CHECK_THROWS_WITH_AS(MPSState::load("/tmp/kerrcav_no_such_file.bin"),
                       doctest::Contains("cannot open"), std::runtime_error);

  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("vacuum bookkeeping flips once a site is touched") {
  auto st = MPSState::vacuum(3, 4);
  CHECK(st.near_vacuum(1));
  st.mark_active(1);
  CHECK_FALSE(st.near_vacuum(1));
  CHECK(st.near_vacuum(2));
}
