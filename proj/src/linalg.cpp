#include "kerrcav/linalg.hpp"

#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace kerrcav::linalg {

void ensure_single_threaded_blas() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    ::setenv("OPENBLAS_NUM_THREADS", "1", 0);
    ::setenv("OMP_NUM_THREADS", "1", 0);
    openblas_set_num_threads(1);
  });
}

// ---- full thin SVD ----

SvdResult svd_thin(const MatrixXcd& a) {
  ensure_single_threaded_blas();
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int r = std::min(m, n);
  MatrixXcd work = a; // zgesdd destroys its input
  SvdResult out;
  out.u.resize(m, r);
  out.sigma.resize(r);
  MatrixXcd vt(r, n);
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                                   out.sigma.data(), out.u.data(), m,
                                   vt.data(), r);
  if (info != 0) {
    // divide-and-conquer occasionally fails to converge; retry with the
    // slower QR-iteration driver before giving up
    work = a;
    std::vector<double> superb(static_cast<size_t>(std::max<lapack_int>(1, r - 1)));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, work.data(), m,
                          out.sigma.data(), out.u.data(), m, vt.data(), r,
                          superb.data());
    if (info != 0)
      throw std::runtime_error("svd_thin: LAPACK failed with info=" +
                               std::to_string(info));
  }
  out.v = vt.adjoint();
  return out;
}

// ---- Hermitian eigendecomposition ----

EighResult eigh(const MatrixXcd& h) {
  ensure_single_threaded_blas();
  if (h.rows() != h.cols())
    throw std::invalid_argument("eigh: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(h.rows());
  EighResult out;
  out.vectors = h;
  out.values.resize(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                   out.vectors.data(), n, out.values.data());
  if (info != 0)
    throw std::runtime_error("eigh: zheevd failed with info=" +
                             std::to_string(info));
  return out;
}

MatrixXcd expm_i_hermitian(const MatrixXcd& h, double t) {
  EighResult e = eigh(h);
  const Eigen::Index n = h.rows();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k)
    phases(k) = std::exp(std::complex<double>(0.0, -e.values(k) * t));
  return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

// ---- truncated SVD via the Gram matrix of the smaller side ----

namespace {

// modified Gram-Schmidt with renormalization; keeps column count
void orthonormalize_columns(MatrixXcd& q) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const cxd proj = q.col(i).dot(q.col(j));
        q.col(j).noalias() -= proj * q.col(i);
      }
    }
    const double nrm = q.col(j).norm();
    if (nrm > 0.0) q.col(j) /= nrm;
  }
}

} // namespace

SvdResult svd_gram_topk(const MatrixXcd& a, int k, double sigma_floor,
                        double* discarded_sq) {
  ensure_single_threaded_blas();
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const bool rows_small = m <= n;
  const lapack_int d = rows_small ? m : n;
  k = std::min<int>(k, d);

  MatrixXcd gram(d, d);
  if (rows_small)
    gram.noalias() = a * a.adjoint();
  else
    gram.noalias() = a.adjoint() * a;
  const double total_sq = gram.real().trace();

  // selected eigenpairs: the k largest of the ascending spectrum
  VectorXd w(d);
  MatrixXcd z(d, k);
  std::vector<lapack_int> isuppz(static_cast<size_t>(2 * std::max(1, k)));
  lapack_int found = 0;
  lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', d,
                                   gram.data(), d, 0.0, 0.0, d - k + 1, d,
                                   0.0, &found, w.data(), z.data(), d,
                                   isuppz.data());
  if (info != 0)
    throw std::runtime_error("svd_gram_topk: zheevr failed with info=" +
                             std::to_string(info));
  k = static_cast<int>(found);

  // descending order; clamp round-off negatives; apply the absolute floor
  std::vector<int> order(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return w(x) > w(y); });
  int kept = 0;
  for (int i = 0; i < k; ++i) {
    const double ev = std::max(0.0, w(order[static_cast<size_t>(i)]));
    if (std::sqrt(ev) < sigma_floor) break;
    ++kept;
  }
  kept = std::max(kept, 1); // never return an empty factorization

  SvdResult out;
  out.sigma.resize(kept);
  MatrixXcd zk(d, kept);
  for (int i = 0; i < kept; ++i) {
    const int src = order[static_cast<size_t>(i)];
    out.sigma(i) = std::sqrt(std::max(0.0, w(src)));
    zk.col(i) = z.col(src);
  }
  orthonormalize_columns(zk);

  // recover the other side's vectors through the state itself
  if (rows_small) {
    out.u = std::move(zk);
    out.v.noalias() = a.adjoint() * out.u;
  } else {
    out.v = std::move(zk);
    out.u.noalias() = a * out.v;
  }
  MatrixXcd& other = rows_small ? out.v : out.u;
  for (int i = 0; i < kept; ++i) {
    const double s = out.sigma(i);
    if (s > 0.0)
      other.col(i) /= s;
    else
      other.col(i).setZero();
  }
  orthonormalize_columns(other);

  if (discarded_sq) {
    double kept_sq = 0.0;
    for (int i = 0; i < kept; ++i) kept_sq += out.sigma(i) * out.sigma(i);
    *discarded_sq = std::max(0.0, total_sq - kept_sq);
  }
  return out;
}

} // namespace kerrcav::linalg
