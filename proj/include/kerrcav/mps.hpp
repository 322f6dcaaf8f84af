#pragma once

// Matrix product state in canonical (Vidal) form on an open chain:
// per-site three-index tensors Gamma(l, p, r) and per-bond singular value
// vectors lambda.  Site 0 carries the oscillator, sites 1..N-1 the mapped
// bath modes.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace kerrcav::mps {

using cxd = std::complex<double>;

// dense rank-3 tensor, column-major over (left, phys, right)
struct Tensor3 {
  int dl = 1, dp = 1, dr = 1;
  Eigen::VectorXcd data;

  Tensor3() = default;
  Tensor3(int dl_, int dp_, int dr_)
      : dl(dl_), dp(dp_), dr(dr_),
        data(Eigen::VectorXcd::Zero(static_cast<long>(dl_) * dp_ * dr_)) {}

  long flat(int l, int p, int r) const {
    return l + static_cast<long>(dl) * (p + static_cast<long>(dp) * r);
  }
  cxd& at(int l, int p, int r) { return data(flat(l, p, r)); }
  const cxd& at(int l, int p, int r) const { return data(flat(l, p, r)); }

  // (dl x dr) matrix view of the slice at fixed physical index
  Eigen::Map<const Eigen::MatrixXcd, 0, Eigen::OuterStride<>> slice(int p) const {
    return {data.data() + static_cast<long>(dl) * p, dl, dr,
            Eigen::OuterStride<>(static_cast<long>(dl) * dp)};
  }
  Eigen::Map<Eigen::MatrixXcd, 0, Eigen::OuterStride<>> slice(int p) {
    return {data.data() + static_cast<long>(dl) * p, dl, dr,
            Eigen::OuterStride<>(static_cast<long>(dl) * dp)};
  }
};

class MPSState {
 public:
  MPSState() = default;

  int n_sites() const { return static_cast<int>(gamma_.size()); }
  int phys_dim() const { return gamma_.empty() ? 0 : gamma_[0].dp; }
  int bond_dim(int b) const { return static_cast<int>(lambda_[b].size()); }
  int max_bond_dim() const;

  Tensor3& site(int i) { return gamma_[static_cast<std::size_t>(i)]; }
  const Tensor3& site(int i) const { return gamma_[static_cast<std::size_t>(i)]; }
  Eigen::VectorXd& bond(int b) { return lambda_[static_cast<std::size_t>(b)]; }
  const Eigen::VectorXd& bond(int b) const {
    return lambda_[static_cast<std::size_t>(b)];
  }

  // gate-skipping bookkeeping: true while a site has never been touched by a
  // two-site update and still holds its initial vacuum tensor
  bool near_vacuum(int i) const { return vacuum_[static_cast<std::size_t>(i)] != 0; }
  void mark_active(int i) { vacuum_[static_cast<std::size_t>(i)] = 0; }

  // all sites in the Fock vacuum, all bonds trivial
  static MPSState vacuum(int n_sites, int phys_dim);

  // same, with one physical dimension per site (the oscillator site often
  // needs more Fock headroom than the bath modes, which hold at most a
  // photon or so each)
  static MPSState vacuum(const std::vector<int>& phys_dims);

  // site 0 in a truncated coherent state of the given amplitude, bath sites
  // in vacuum; throws if the truncated probability tail exceeds 1e-5,
  // naming the dimension that would suffice
  static MPSState coherent_system(int n_sites, int phys_dim, cxd amplitude);

  // per-site-dimension variant; the amplitude check applies to phys_dims[0]
  static MPSState coherent_system(const std::vector<int>& phys_dims,
                                  cxd amplitude);

  // exact squared norm by transfer-matrix contraction (no gauge assumption)
  double norm_sq() const;

  // worst deviation of the left/right canonical conditions from identity,
  // with each residual weighted by the adjacent bond spectrum so the value
  // bounds the error such a defect can inject into a lambda^2-weighted
  // reduced-density contraction (unweighted residuals diverge as
  // eps/lambda_min^2 for any representation that keeps tiny singular
  // values, even when every observable is still exact)
  double canonical_defect() const;

  // restore canonical form in place: a left-to-right QR sweep followed by a
  // right-to-left SVD sweep that rebuilds every bond spectrum; singular
  // values below the floor are dropped and the state is renormalized
  void re_orthogonalize(double lambda_floor = 1e-12);

  // reduced density matrix of one site, contracted through the bond
  // spectra; requires canonical form and throws (advising
  // re-orthogonalization) if the gauge defect exceeds the tolerance
  Eigen::MatrixXcd site_density_matrix(int i, double gauge_tol = 1e-6) const;

  // binary checkpoint of tensors and bond spectra
  void save(const std::string& path) const;
  static MPSState load(const std::string& path);

 private:
  std::vector<Tensor3> gamma_;
  std::vector<Eigen::VectorXd> lambda_; // n_sites - 1 entries
  std::vector<char> vacuum_;
};

} // namespace kerrcav::mps
