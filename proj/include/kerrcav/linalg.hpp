#pragma once

// Thin deterministic wrappers around LAPACK dense factorizations used by the
// tensor-network engine and the observable stack.  All routines run
// single-threaded (the process pins its BLAS backend to one thread at start)
// so repeated runs produce bit-identical results.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace kerrcav::linalg {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

// Called once before any BLAS/LAPACK work; safe to call repeatedly.
void ensure_single_threaded_blas();

struct SvdResult {
  MatrixXcd u;       // m x r, isometric columns
  VectorXd sigma;    // r, descending, non-negative
  MatrixXcd v;       // n x r, isometric columns (A = u * diag(sigma) * v^H)
};

// Full thin SVD via divide-and-conquer (zgesdd), with a zgesvd fallback on
// the rare convergence failure.  Throws std::runtime_error on failure.
SvdResult svd_thin(const MatrixXcd& a);

// Top-k singular triplets via the Gram matrix of the smaller side and a
// selected-eigenpair Hermitian solve (zheevr).  Columns are re-orthonormalized
// so u/v are isometries to machine precision.  `discarded_sq` receives the
// total squared singular weight not represented by the returned triplets
// (trace identity; never negative up to rounding).  Singular values below
// `sigma_floor` are dropped even if k allows them.
SvdResult svd_gram_topk(const MatrixXcd& a, int k, double sigma_floor,
                        double* discarded_sq);

struct EighResult {
  VectorXd values;   // ascending
  MatrixXcd vectors; // columns
};

// Hermitian eigendecomposition via zheevd. Throws on failure.
EighResult eigh(const MatrixXcd& h);

// exp(-i * h * t) for Hermitian h, via eigendecomposition; unitary to
// machine precision.
MatrixXcd expm_i_hermitian(const MatrixXcd& h, double t);

} // namespace kerrcav::linalg
