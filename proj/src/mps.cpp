#include "kerrcav/mps.hpp"

#include "kerrcav/fock.hpp"
#include "kerrcav/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kerrcav::mps {

namespace {

const Eigen::VectorXd kTrivialBond = Eigen::VectorXd::Ones(1);

// smallest truncation dimension whose coherent-state tail is within tol
int sufficient_coherent_dim(cxd amplitude, double tol) {
  const double mu = std::norm(amplitude); // Poisson mean
  double term = std::exp(-mu);
  double cum = term;
  for (int d = 1; d <= 4096; ++d) {
    if (1.0 - cum <= tol) return d;
    term *= mu / static_cast<double>(d);
    cum += term;
  }
  return 4096;
}

} // namespace

int MPSState::max_bond_dim() const {
  int chi = 0;
  for (const auto& l : lambda_) chi = std::max(chi, static_cast<int>(l.size()));
  return chi;
}

MPSState MPSState::vacuum(const std::vector<int>& phys_dims) {
  const int n_sites = static_cast<int>(phys_dims.size());
  if (n_sites < 2) throw std::invalid_argument("need at least two sites");
  MPSState st;
  st.gamma_.reserve(static_cast<std::size_t>(n_sites));
  for (int d : phys_dims) {
    if (d < 2) throw std::invalid_argument("physical dimension must be >= 2");
    Tensor3 g(1, d, 1);
    g.at(0, 0, 0) = 1.0;
    st.gamma_.push_back(std::move(g));
  }
  st.lambda_.assign(static_cast<std::size_t>(n_sites) - 1, kTrivialBond);
  st.vacuum_.assign(static_cast<std::size_t>(n_sites), 1);
  return st;
}

MPSState MPSState::vacuum(int n_sites, int phys_dim) {
  if (n_sites < 2) throw std::invalid_argument("need at least two sites");
  return vacuum(std::vector<int>(static_cast<std::size_t>(n_sites), phys_dim));
}

MPSState MPSState::coherent_system(const std::vector<int>& phys_dims,
                                   cxd amplitude) {
  MPSState st = vacuum(phys_dims);
  if (amplitude == cxd(0.0, 0.0)) return st;
  const int sys_dim = phys_dims[0];
  double loss = 0.0;
  const Eigen::VectorXcd c = fock::coherent_vector(amplitude, sys_dim, &loss);
  if (loss > 1e-5) {
    std::ostringstream msg;
    msg << "coherent initial state of amplitude |" << std::abs(amplitude)
        << "| loses probability " << loss
        << " at dimension " << sys_dim
        << " (tolerance 1e-05); use a site dimension of at least "
        << sufficient_coherent_dim(amplitude, 1e-5);
    throw std::invalid_argument(msg.str());
  }
  for (int p = 0; p < sys_dim; ++p) st.gamma_[0].at(0, p, 0) = c(p);
  st.vacuum_[0] = 0;
  return st;
}

MPSState MPSState::coherent_system(int n_sites, int phys_dim, cxd amplitude) {
  if (n_sites < 2) throw std::invalid_argument("need at least two sites");
  return coherent_system(
      std::vector<int>(static_cast<std::size_t>(n_sites), phys_dim),
      amplitude);
}

double MPSState::norm_sq() const {
  const int n = n_sites();
  Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& lr = (i < n - 1) ? lambda_[static_cast<std::size_t>(i)]
                                            : kTrivialBond;
    const Tensor3& g = gamma_[static_cast<std::size_t>(i)];
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(g.dr, g.dr);
    for (int p = 0; p < g.dp; ++p) {
      const Eigen::MatrixXcd b = g.slice(p) * lr.asDiagonal();
      next.noalias() += b.adjoint() * env * b;
    }
    env = std::move(next);
  }
  return env(0, 0).real();
}

double MPSState::canonical_defect() const {
  const int n = n_sites();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Tensor3& g = gamma_[static_cast<std::size_t>(i)];
    const Eigen::VectorXd& ll = (i > 0) ? lambda_[static_cast<std::size_t>(i) - 1]
                                        : kTrivialBond;
    const Eigen::VectorXd& lr = (i < n - 1) ? lambda_[static_cast<std::size_t>(i)]
                                            : kTrivialBond;
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(g.dr, g.dr);
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Zero(g.dl, g.dl);
    for (int p = 0; p < g.dp; ++p) {
      const Eigen::MatrixXcd a = ll.asDiagonal() * g.slice(p);
      const Eigen::MatrixXcd b = g.slice(p) * lr.asDiagonal();
      left.noalias() += a.adjoint() * a;
      right.noalias() += b * b.adjoint();
    }
    left -= Eigen::MatrixXcd::Identity(g.dr, g.dr);
    right -= Eigen::MatrixXcd::Identity(g.dl, g.dl);
    // weight each residual by the bond spectrum on its open index: only
    // that weighted amount can reach a lambda^2-weighted contraction
    left = lr.asDiagonal() * left * lr.asDiagonal();
    right = ll.asDiagonal() * right * ll.asDiagonal();
    worst = std::max(worst, left.cwiseAbs().maxCoeff());
    worst = std::max(worst, right.cwiseAbs().maxCoeff());
  }
  return worst;
}

void MPSState::re_orthogonalize(double lambda_floor) {
  const int n = n_sites();
  if (n < 2) return;

  // left-to-right QR sweep over T_i = Gamma_i * lambda_i (carry the
  // triangular factor); produces a left-orthonormal chain
  std::vector<Tensor3> a(static_cast<std::size_t>(n));
  Eigen::MatrixXcd carry = Eigen::MatrixXcd::Ones(1, 1);
  for (int i = 0; i < n; ++i) {
    const Tensor3& g = gamma_[static_cast<std::size_t>(i)];
    const Eigen::VectorXd& lr = (i < n - 1) ? lambda_[static_cast<std::size_t>(i)]
                                            : kTrivialBond;
    const int k = static_cast<int>(carry.rows());
    Eigen::MatrixXcd m(static_cast<long>(k) * g.dp, g.dr);
    for (int p = 0; p < g.dp; ++p) {
      m.middleRows(static_cast<long>(k) * p, k).noalias() =
          carry * (g.slice(p) * lr.asDiagonal());
    }
    const int kq = std::min(static_cast<int>(m.rows()), g.dr);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    Eigen::MatrixXcd q = qr.householderQ() *
                         Eigen::MatrixXcd::Identity(m.rows(), kq);
    Eigen::MatrixXcd r = qr.matrixQR()
                             .topRows(kq)
                             .template triangularView<Eigen::Upper>();
    Tensor3 t(k, g.dp, kq);
    for (int p = 0; p < g.dp; ++p) {
      t.slice(p) = q.middleRows(static_cast<long>(k) * p, k);
    }
    a[static_cast<std::size_t>(i)] = std::move(t);
    carry = std::move(r);
  }
  // carry is now 1x1 and holds the norm and global phase; keep the phase
  const cxd tail = carry(0, 0);
  const double tail_abs = std::abs(tail);
  const cxd phase = tail_abs > 0.0 ? tail / tail_abs : cxd(1.0, 0.0);
  {
    Tensor3& last = a[static_cast<std::size_t>(n) - 1];
    last.data *= phase;
  }

  // right-to-left SVD sweep rebuilds bond spectra and Gamma tensors
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Ones(1, 1);
  for (int i = n - 1; i >= 1; --i) {
    const Tensor3& t = a[static_cast<std::size_t>(i)];
    const int wr = static_cast<int>(w.cols());
    Eigen::MatrixXcd m(t.dl, static_cast<long>(t.dp) * wr);
    for (int p = 0; p < t.dp; ++p) {
      m.middleCols(static_cast<long>(p) * wr, wr).noalias() = t.slice(p) * w;
    }
    const linalg::SvdResult svd = linalg::svd_thin(m);
    int keep = 0;
    while (keep < svd.sigma.size() && svd.sigma(keep) >= lambda_floor) ++keep;
    keep = std::max(keep, 1);
    Eigen::VectorXd lam = svd.sigma.head(keep);
    const double scale = lam.norm();
    if (scale <= 0.0) throw std::runtime_error("re_orthogonalize: zero state");
    lam /= scale;
    // Gamma_i = rows of V^H with the (new) right bond spectrum divided out
    const Eigen::VectorXd& lr_new = (i < n - 1)
                                        ? lambda_[static_cast<std::size_t>(i)]
                                        : kTrivialBond;
    Tensor3 gnew(keep, t.dp, wr);
    for (int p = 0; p < t.dp; ++p) {
      gnew.slice(p) = svd.v.leftCols(keep)
                          .middleRows(static_cast<long>(p) * wr, wr)
                          .adjoint();
      for (int r = 0; r < wr; ++r) {
        const double d = (r < lr_new.size()) ? lr_new(r) : 1.0;
        if (d > 0.0) gnew.slice(p).col(r) /= d;
      }
    }
    gamma_[static_cast<std::size_t>(i)] = std::move(gnew);
    lambda_[static_cast<std::size_t>(i) - 1] = std::move(lam);
    w = svd.u.leftCols(keep) * svd.sigma.head(keep).asDiagonal();
  }
  {
    const Tensor3& t = a[0];
    const int wr = static_cast<int>(w.cols());
    const Eigen::VectorXd& lr_new = lambda_[0];
    Tensor3 gnew(1, t.dp, wr);
    for (int p = 0; p < t.dp; ++p) {
      gnew.slice(p).noalias() = t.slice(p) * w;
      for (int r = 0; r < wr; ++r) {
        const double d = (r < lr_new.size()) ? lr_new(r) : 1.0;
        if (d > 0.0) gnew.slice(p).col(r) /= d;
      }
    }
    // the leftmost tensor absorbs the overall normalization
    double nrm = 0.0;
    for (int p = 0; p < t.dp; ++p) {
      nrm += (gnew.slice(p) * lr_new.asDiagonal()).squaredNorm();
    }
    if (nrm <= 0.0) throw std::runtime_error("re_orthogonalize: zero state");
    gnew.data /= std::sqrt(nrm);
    gamma_[0] = std::move(gnew);
  }
}

Eigen::MatrixXcd MPSState::site_density_matrix(int i, double gauge_tol) const {
  if (i < 0 || i >= n_sites()) throw std::invalid_argument("site index out of range");
  const double defect = canonical_defect();
  if (defect > gauge_tol) {
    std::ostringstream msg;
    msg << "state is out of canonical form (gauge defect " << defect
        << " > " << gauge_tol
        << "); re-orthogonalize before taking reduced density matrices";
    throw std::runtime_error(msg.str());
  }
  const Tensor3& g = gamma_[static_cast<std::size_t>(i)];
  const Eigen::VectorXd& ll = (i > 0) ? lambda_[static_cast<std::size_t>(i) - 1]
                                      : kTrivialBond;
  const Eigen::VectorXd& lr = (i < n_sites() - 1)
                                  ? lambda_[static_cast<std::size_t>(i)]
                                  : kTrivialBond;
  std::vector<Eigen::MatrixXcd> w(static_cast<std::size_t>(g.dp));
  for (int p = 0; p < g.dp; ++p) {
    w[static_cast<std::size_t>(p)] = ll.asDiagonal() * g.slice(p) * lr.asDiagonal();
  }
  Eigen::MatrixXcd rho(g.dp, g.dp);
  for (int p = 0; p < g.dp; ++p) {
    for (int q = 0; q <= p; ++q) {
      const cxd v = (w[static_cast<std::size_t>(q)].conjugate().array() *
                     w[static_cast<std::size_t>(p)].array())
                        .sum();
      rho(p, q) = v;
      rho(q, p) = std::conj(v);
    }
  }
  return 0.5 * (rho + rho.adjoint().eval());
}

// ---- checkpointing ----

namespace {
constexpr char kMagic[8] = {'K', 'C', 'M', 'P', 'S', '0', '1', '\n'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint truncated");
  return v;
}
} // namespace

void MPSState::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::int64_t>(out, n_sites());
  write_pod<std::int64_t>(out, phys_dim());
  for (const auto& l : lambda_) {
    write_pod<std::int64_t>(out, static_cast<std::int64_t>(l.size()));
    out.write(reinterpret_cast<const char*>(l.data()),
              static_cast<std::streamsize>(sizeof(double)) * l.size());
  }
  for (const auto& g : gamma_) {
    write_pod<std::int64_t>(out, g.dl);
    write_pod<std::int64_t>(out, g.dp);
    write_pod<std::int64_t>(out, g.dr);
    out.write(reinterpret_cast<const char*>(g.data.data()),
              static_cast<std::streamsize>(sizeof(cxd)) * g.data.size());
  }
  out.write(reinterpret_cast<const char*>(vacuum_.data()),
            static_cast<std::streamsize>(vacuum_.size()));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

MPSState MPSState::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a state checkpoint: " + path);
  }
  const auto n = read_pod<std::int64_t>(in);
  const auto m = read_pod<std::int64_t>(in);
  if (n < 2 || n > 100000 || m < 2 || m > 100000) {
    throw std::runtime_error("checkpoint header out of range");
  }
  MPSState st;
  st.lambda_.resize(static_cast<std::size_t>(n) - 1);
  for (auto& l : st.lambda_) {
    const auto d = read_pod<std::int64_t>(in);
    if (d < 1 || d > 1000000) throw std::runtime_error("checkpoint bond dimension out of range");
    l.resize(d);
    in.read(reinterpret_cast<char*>(l.data()),
            static_cast<std::streamsize>(sizeof(double)) * d);
  }
  st.gamma_.resize(static_cast<std::size_t>(n));
  bool first = true;
  for (auto& g : st.gamma_) {
    const auto dl = read_pod<std::int64_t>(in);
    const auto dp = read_pod<std::int64_t>(in);
    const auto dr = read_pod<std::int64_t>(in);
    // the header dimension pins the oscillator site; bath sites may carry a
    // smaller Fock truncation
    if (dl < 1 || dr < 1 || dp < 2 || dp > 100000 || (first && dp != m)) {
      throw std::runtime_error("checkpoint tensor header invalid");
    }
    first = false;
    g = Tensor3(static_cast<int>(dl), static_cast<int>(dp), static_cast<int>(dr));
    in.read(reinterpret_cast<char*>(g.data.data()),
            static_cast<std::streamsize>(sizeof(cxd)) * g.data.size());
  }
  st.vacuum_.resize(static_cast<std::size_t>(n));
  in.read(st.vacuum_.data(), static_cast<std::streamsize>(st.vacuum_.size()));
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    const auto& g = st.gamma_[static_cast<std::size_t>(i)];
    const auto& h = st.gamma_[static_cast<std::size_t>(i) + 1];
    const auto& l = st.lambda_[static_cast<std::size_t>(i)];
    if (g.dr != static_cast<int>(l.size()) || h.dl != static_cast<int>(l.size())) {
      throw std::runtime_error("checkpoint bond dimensions inconsistent");
    }
  }
  return st;
}

} // namespace kerrcav::mps
