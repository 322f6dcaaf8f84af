#include "kerrcav/tebd.hpp"

#include "kerrcav/fock.hpp"
#include "kerrcav/linalg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kerrcav::tebd {

namespace {

const Eigen::VectorXd kTrivialBond = Eigen::VectorXd::Ones(1);

// element ((p1, p2), (q1, q2)) = a(p1, q1) * b(p2, q2) with p1 fast; the two
// site dimensions may differ
Eigen::MatrixXcd two_site_op(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  const int m1 = static_cast<int>(a.rows());
  const int m2 = static_cast<int>(b.rows());
  Eigen::MatrixXcd out(m1 * m2, m1 * m2);
  for (int q2 = 0; q2 < m2; ++q2) {
    for (int q1 = 0; q1 < m1; ++q1) {
      for (int p2 = 0; p2 < m2; ++p2) {
        for (int p1 = 0; p1 < m1; ++p1) {
          out(p1 + m1 * p2, q1 + m1 * q2) = a(p1, q1) * b(p2, q2);
        }
      }
    }
  }
  return out;
}

void check_unitary(const Eigen::MatrixXcd& u, double tol) {
  const long d = u.rows();
  const double err =
      (u * u.adjoint() - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > tol) {
    std::ostringstream msg;
    msg << "bond gate failed the unitarity check: deviation " << err
        << " exceeds " << tol;
    throw std::runtime_error(msg.str());
  }
}

// SVD of the two-site matrix truncated to chi_max with an absolute floor;
// chooses a Gram-based top-k factorization when the matrix is large
linalg::SvdResult truncated_svd(const Eigen::MatrixXcd& s, int chi_max,
                                double sigma_floor, double* discarded_sq) {
  const int d1 = static_cast<int>(s.rows());
  const int d2 = static_cast<int>(s.cols());
  const int d_small = std::min(d1, d2);
  const int k_req = std::min(chi_max, d_small);
  if (d_small >= 160 && 3 * k_req <= d_small) {
    return linalg::svd_gram_topk(s, k_req, sigma_floor, discarded_sq);
  }
  linalg::SvdResult full = linalg::svd_thin(s);
  int kept = 0;
  double total = 0.0;
  for (int i = 0; i < full.sigma.size(); ++i) {
    total += full.sigma(i) * full.sigma(i);
  }
  for (int i = 0; i < full.sigma.size() && i < k_req; ++i) {
    if (full.sigma(i) >= sigma_floor || i == 0) {
      ++kept;
    } else {
      break;
    }
  }
  double kept_sq = 0.0;
  for (int i = 0; i < kept; ++i) kept_sq += full.sigma(i) * full.sigma(i);
  if (discarded_sq != nullptr) *discarded_sq = std::max(total - kept_sq, 0.0);
  linalg::SvdResult out;
  out.u = full.u.leftCols(kept);
  out.sigma = full.sigma.head(kept);
  out.v = full.v.leftCols(kept);
  return out;
}

} // namespace

void TebdConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (chi_max < 1) throw std::invalid_argument("bond-dimension cap must be >= 1");
  if (!(lambda_floor >= 0.0) || lambda_floor > 1e-2) {
    throw std::invalid_argument("singular-value floor must lie in [0, 1e-2]");
  }
}

Eigen::MatrixXcd Evolver::system_hamiltonian() const {
  const int m = dims_[0];
  const Eigen::MatrixXcd a = fock::annihilation(m);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, m);
  for (int n = 0; n < m; ++n) {
    const double nd = static_cast<double>(n);
    h(n, n) = params_.delta * nd + params_.chi2 * nd * (nd - 1.0);
  }
  const cxd i_unit(0.0, 1.0);
  h += i_unit * (params_.drive * a.adjoint() - std::conj(params_.drive) * a);
  return h;
}

Eigen::MatrixXcd Evolver::bond_hamiltonian(int b) const {
  if (b < 0 || b >= n_sites_ - 1) throw std::invalid_argument("bond index out of range");
  const int ml = dims_[static_cast<std::size_t>(b)];
  const int mr = dims_[static_cast<std::size_t>(b) + 1];
  const Eigen::MatrixXcd al = fock::annihilation(ml);
  const Eigen::MatrixXcd ar = fock::annihilation(mr);
  const Eigen::MatrixXcd num_l = fock::number_operator(ml);
  const Eigen::MatrixXcd num_r = fock::number_operator(mr);
  const Eigen::MatrixXcd eye_l = Eigen::MatrixXcd::Identity(ml, ml);
  const Eigen::MatrixXcd eye_r = Eigen::MatrixXcd::Identity(mr, mr);
  const double eta = (b == 0) ? chain_.eta_sys
                              : chain_.hoppings[static_cast<std::size_t>(b) - 1];
  Eigen::MatrixXcd h =
      eta * (two_site_op(al.adjoint(), ar) + two_site_op(al, ar.adjoint()));
  if (b == 0) {
    h += two_site_op(system_hamiltonian(), eye_r);
  } else {
    // chain-mode frequency of the left site, shared between adjacent bonds
    const double f_left = chain_.site_freqs[static_cast<std::size_t>(b) - 1];
    h += 0.5 * f_left * two_site_op(num_l, eye_r);
  }
  // right site: full weight on the last bond, half shared elsewhere
  const double f_right = chain_.site_freqs[static_cast<std::size_t>(b)];
  const double w_right = (b == n_sites_ - 2) ? 1.0 : 0.5;
  h += w_right * f_right * two_site_op(eye_l, num_r);
  return h;
}

Evolver::Evolver(const model::SystemParams& params,
                 const chain::ChainCoefficients& chain,
                 std::vector<int> phys_dims, const TebdConfig& cfg)
    : params_(params), chain_(chain), dims_(std::move(phys_dims)), cfg_(cfg) {
  params_.validate();
  cfg_.validate();
  for (int d : dims_) {
    if (d < 2) throw std::invalid_argument("physical dimension must be >= 2");
  }
  n_sites_ = static_cast<int>(chain_.site_freqs.size()) + 1;
  if (n_sites_ < 2) throw std::invalid_argument("chain must provide at least one mode");
  if (dims_.size() != static_cast<std::size_t>(n_sites_)) {
    throw std::invalid_argument("one physical dimension per site is required");
  }
  if (chain_.hoppings.size() + 2 != static_cast<std::size_t>(n_sites_)) {
    throw std::invalid_argument("chain coefficient lengths are inconsistent");
  }

  gates_.resize(static_cast<std::size_t>(n_sites_) - 1);
  for (int b = 0; b < n_sites_ - 1; ++b) {
    const double tau = (b % 2 == 0) ? 0.5 * cfg_.dt : cfg_.dt;
    gates_[static_cast<std::size_t>(b)] = make_gate(b, tau);
  }
}

Evolver::Evolver(const model::SystemParams& params,
                 const chain::ChainCoefficients& chain, int phys_dim,
                 const TebdConfig& cfg)
    : Evolver(params, chain,
              std::vector<int>(chain.site_freqs.size() + 1, phys_dim), cfg) {}

Evolver::BondGate Evolver::make_gate(int b, double tau) const {
  const Eigen::MatrixXcd h = bond_hamiltonian(b);
  BondGate gate;
  if (b == 0) {
    gate.dense = true;
    gate.u = linalg::expm_i_hermitian(h, tau);
    check_unitary(gate.u, 1e-12);
    return gate;
  }
  // occupation blocks of the two-site basis, index p1 + m_left*p2
  const int ml = dims_[static_cast<std::size_t>(b)];
  const int mr = dims_[static_cast<std::size_t>(b) + 1];
  gate.dense = false;
  gate.blocks.assign(static_cast<std::size_t>(ml + mr - 1), {});
  for (int p2 = 0; p2 < mr; ++p2) {
    for (int p1 = 0; p1 < ml; ++p1) {
      gate.blocks[static_cast<std::size_t>(p1 + p2)].push_back(p1 + ml * p2);
    }
  }
  gate.ub.reserve(gate.blocks.size());
  for (const auto& idx : gate.blocks) {
    const int bs = static_cast<int>(idx.size());
    Eigen::MatrixXcd hb(bs, bs);
    for (int c = 0; c < bs; ++c) {
      for (int r = 0; r < bs; ++r) {
        hb(r, c) = h(idx[static_cast<std::size_t>(r)],
                     idx[static_cast<std::size_t>(c)]);
      }
    }
    Eigen::MatrixXcd u = linalg::expm_i_hermitian(hb, tau);
    check_unitary(u, 1e-12);
    gate.ub.push_back(std::move(u));
  }
  return gate;
}

void Evolver::apply_bond(mps::MPSState& st, int b, const BondGate& gate) {
  const int i = b;
  const int j = b + 1;
  if (b > 0 && st.near_vacuum(i) && st.near_vacuum(j)) {
    return; // hopping gates leave the joint vacuum invariant exactly
  }
  const int m = phys_dim_;
  mps::Tensor3& gi = st.site(i);
  mps::Tensor3& gj = st.site(j);
  const Eigen::VectorXd& ll = (b > 0) ? st.bond(b - 1) : kTrivialBond;
  const Eigen::VectorXd& lm = st.bond(b);
  const Eigen::VectorXd& lr = (b + 1 < n_sites_ - 1) ? st.bond(b + 1) : kTrivialBond;
  const int dl = gi.dl;
  const int dm = static_cast<int>(lm.size());
  const int dr = gj.dr;

  // stack the lambda-weighted slices and contract the middle bond once
  Eigen::MatrixXcd t1(static_cast<long>(dl) * m, dm);
  for (int p1 = 0; p1 < m; ++p1) {
    t1.middleRows(static_cast<long>(p1) * dl, dl) =
        ll.asDiagonal() * gi.slice(p1) * lm.asDiagonal();
  }
  Eigen::MatrixXcd t2(dm, static_cast<long>(m) * dr);
  for (int p2 = 0; p2 < m; ++p2) {
    const Eigen::MatrixXcd a2 = gj.slice(p2) * lr.asDiagonal();
    for (int r = 0; r < dr; ++r) {
      t2.col(p2 + static_cast<long>(m) * r) = a2.col(r);
    }
  }
  Eigen::MatrixXcd s(static_cast<long>(dl) * m, static_cast<long>(m) * dr);
  s.noalias() = t1 * t2; // rows (l, p1), cols (p2, r)

  // permute to pair-major layout, apply the gate, permute back
  Eigen::MatrixXcd theta(static_cast<long>(dl) * dr, static_cast<long>(m) * m);
  for (int p2 = 0; p2 < m; ++p2) {
    for (int p1 = 0; p1 < m; ++p1) {
      const long col = p1 + static_cast<long>(m) * p2;
      for (int r = 0; r < dr; ++r) {
        theta.block(static_cast<long>(r) * dl, col, dl, 1) =
            s.block(static_cast<long>(p1) * dl, p2 + static_cast<long>(m) * r,
                    dl, 1);
      }
    }
  }
  if (gate.dense) {
    theta = (theta * gate.u.transpose()).eval();
  } else {
    for (std::size_t bl = 0; bl < blocks_.size(); ++bl) {
      const auto& idx = blocks_[bl];
      const int bs = static_cast<int>(idx.size());
      Eigen::MatrixXcd sub(theta.rows(), bs);
      for (int c = 0; c < bs; ++c) sub.col(c) = theta.col(idx[static_cast<std::size_t>(c)]);
      sub = (sub * gate.ub[bl].transpose()).eval();
      for (int c = 0; c < bs; ++c) theta.col(idx[static_cast<std::size_t>(c)]) = sub.col(c);
    }
  }
  for (int p2 = 0; p2 < m; ++p2) {
    for (int p1 = 0; p1 < m; ++p1) {
      const long col = p1 + static_cast<long>(m) * p2;
      for (int r = 0; r < dr; ++r) {
        s.block(static_cast<long>(p1) * dl, p2 + static_cast<long>(m) * r, dl,
                1) = theta.block(static_cast<long>(r) * dl, col, dl, 1);
      }
    }
  }

  double disc = 0.0;
  linalg::SvdResult svd = truncated_svd(s, cfg_.chi_max, cfg_.lambda_floor, &disc);
  discarded_ += disc;
  const int k = static_cast<int>(svd.sigma.size());
  double kept_sq = 0.0;
  for (int c = 0; c < k; ++c) kept_sq += svd.sigma(c) * svd.sigma(c);
  norm_drift_ = std::max(norm_drift_, std::abs(kept_sq + disc - 1.0));
  const double scale = 1.0 / std::sqrt(std::max(kept_sq, 1e-300));
  Eigen::VectorXd lam_new = svd.sigma * scale;

  Eigen::VectorXd inv_ll(dl), inv_lr(dr);
  for (int l = 0; l < dl; ++l) inv_ll(l) = 1.0 / ll(l);
  for (int r = 0; r < dr; ++r) inv_lr(r) = 1.0 / lr(r);
  mps::Tensor3 gi_new(dl, m, k);
  for (int p1 = 0; p1 < m; ++p1) {
    gi_new.slice(p1) =
        inv_ll.asDiagonal() * svd.u.middleRows(static_cast<long>(p1) * dl, dl);
  }
  mps::Tensor3 gj_new(k, m, dr);
  for (int p2 = 0; p2 < m; ++p2) {
    Eigen::MatrixXcd block(k, dr);
    for (int r = 0; r < dr; ++r) {
      block.col(r) =
          svd.v.row(p2 + static_cast<long>(m) * r).adjoint() * inv_lr(r);
    }
    gj_new.slice(p2) = block;
  }
  st.site(i) = std::move(gi_new);
  st.site(j) = std::move(gj_new);
  st.bond(b) = std::move(lam_new);
  st.mark_active(i);
  st.mark_active(j);
}

void Evolver::step(mps::MPSState& state) {
  if (state.n_sites() != n_sites_ || state.phys_dim() != phys_dim_) {
    throw std::invalid_argument("state dimensions do not match the evolver");
  }
  const int n_bonds = n_sites_ - 1;
  for (int b = 0; b < n_bonds; b += 2) apply_bond(state, b, gates_[static_cast<std::size_t>(b)]);
  for (int b = 1; b < n_bonds; b += 2) apply_bond(state, b, gates_[static_cast<std::size_t>(b)]);
  for (int b = 0; b < n_bonds; b += 2) apply_bond(state, b, gates_[static_cast<std::size_t>(b)]);
}

EvolveReport evolve(
    mps::MPSState& state, const model::SystemParams& params,
    const chain::ChainCoefficients& chain, const TebdConfig& cfg,
    double t_total, int stride,
    const std::function<void(int, double, const mps::MPSState&)>& observer) {
  if (t_total < 0.0) throw std::invalid_argument("total time must be >= 0");
  if (stride < 1) throw std::invalid_argument("snapshot stride must be >= 1");
  Evolver ev(params, chain, state.phys_dim(), cfg);
  EvolveReport report;
  if (t_total > chain.recurrence_time) {
    std::ostringstream msg;
    msg << "total time " << t_total << " exceeds the chain recurrence estimate "
        << chain.recurrence_time
        << "; late-time observables may carry boundary reflections";
    report.warnings.push_back(msg.str());
  }
  const int n_steps =
      (t_total == 0.0)
          ? 0
          : static_cast<int>(std::ceil(t_total / cfg.dt - 1e-12));
  // keep the gauge healthy ahead of each measurement so observers can take
  // reduced density matrices without tripping the canonical-form check
  auto groom = [&] {
    if (state.canonical_defect() > 1e-8) state.re_orthogonalize(cfg.lambda_floor);
  };
  if (observer) {
    groom();
    observer(0, 0.0, state);
  }
  for (int k = 1; k <= n_steps; ++k) {
    ev.step(state);
    if (observer && (k % stride == 0 || k == n_steps)) {
      groom();
      observer(k, k * cfg.dt, state);
    }
  }
  if (!observer) groom();
  report.n_steps = n_steps;
  report.final_time = n_steps * cfg.dt;
  report.discarded_weight = ev.discarded_weight();
  report.norm_drift = ev.norm_drift();
  const double norm_dev = std::abs(state.norm_sq() - 1.0);
  if (norm_dev > 1e-8) {
    std::ostringstream msg;
    msg << "state norm drifted by " << norm_dev << " (tolerance 1e-08)";
    report.warnings.push_back(msg.str());
  }
  return report;
}

} // namespace kerrcav::tebd
