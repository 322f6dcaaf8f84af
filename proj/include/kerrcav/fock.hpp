#pragma once

// Truncated single-mode Fock-space building blocks shared by every module:
// ladder operators, canonical states, displacement and parity operators.

#include <Eigen/Dense>
#include <complex>

namespace kerrcav::fock {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// annihilation operator a in dimension m
MatrixXcd annihilation(int m);

// a^dag a as a diagonal matrix
MatrixXcd number_operator(int m);

// diag((-1)^n)
MatrixXcd parity_operator(int m);

// normalized Fock basis vector |n>
VectorXcd fock_vector(int n, int m);

// coherent state truncated to dimension m.  `loss` (optional) receives the
// Poisson tail mass beyond the truncation before renormalization.
VectorXcd coherent_vector(cxd alpha, int m, double* loss = nullptr);

// thermal state with mean occupation nbar, truncated and renormalized
MatrixXcd thermal_density_matrix(double nbar, int m);

// displacement operator D(alpha) = exp(alpha a^dag - alpha^* a) in the given
// dimension, built from the Hermitian eigendecomposition of its generator;
// unitary to machine precision
MatrixXcd displacement_operator(cxd alpha, int dim);

} // namespace kerrcav::fock
