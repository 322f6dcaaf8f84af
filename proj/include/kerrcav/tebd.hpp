#pragma once

// Second-order Trotter evolution of the oscillator-plus-chain state:
// half-step over even bonds, full step over odd bonds, half-step over even
// bonds.  Bond 0 couples the oscillator to the first chain mode and carries
// the full oscillator Hamiltonian (detuning, Kerr term, drive); all other
// bonds are pure hopping and conserve the two-site occupation, which the
// gate application exploits block-by-block.

#include "kerrcav/chain_mapping.hpp"
#include "kerrcav/model.hpp"
#include "kerrcav/mps.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace kerrcav::tebd {

using cxd = std::complex<double>;

struct TebdConfig {
  double dt = 1e-2;
  int chi_max = 36;
  double lambda_floor = 1e-12; // absolute singular-value floor
  void validate() const;
};

class Evolver {
 public:
  Evolver(const model::SystemParams& params,
          const chain::ChainCoefficients& chain, int phys_dim,
          const TebdConfig& cfg);

  // per-site physical dimensions: the oscillator site usually needs more
  // Fock headroom than the bath modes, which rarely hold above one photon,
  // and a slimmer bath truncation shrinks every bond update cubically
  Evolver(const model::SystemParams& params,
          const chain::ChainCoefficients& chain, std::vector<int> phys_dims,
          const TebdConfig& cfg);

  int n_sites() const { return n_sites_; }
  int phys_dim() const { return dims_.empty() ? 0 : dims_[0]; }
  int site_dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
  const TebdConfig& config() const { return cfg_; }

  // two-site generator of one bond (drive bond absorbs the oscillator term)
  Eigen::MatrixXcd bond_hamiltonian(int b) const;

  // one full second-order step of length dt
  void step(mps::MPSState& state);

  // squared-norm weight discarded by all truncations so far
  double discarded_weight() const { return discarded_; }
  // worst deviation of the pre-truncation spectrum weight from 1
  double norm_drift() const { return norm_drift_; }

 private:
  struct BondGate {
    bool dense = false;
    Eigen::MatrixXcd u;               // dense unitary (drive bond)
    std::vector<Eigen::MatrixXcd> ub; // per-occupation-block unitaries
    // pair indices p1 + m_left*p2 grouped by total occupation p1 + p2
    std::vector<std::vector<int>> blocks;
  };

  Eigen::MatrixXcd system_hamiltonian() const;
  BondGate make_gate(int b, double tau) const;
  void apply_bond(mps::MPSState& st, int b, const BondGate& gate);

  model::SystemParams params_;
  chain::ChainCoefficients chain_;
  std::vector<int> dims_; // physical dimension per site
  int n_sites_ = 0;
  TebdConfig cfg_;
  std::vector<BondGate> gates_; // per bond: even at dt/2, odd at dt
  double discarded_ = 0.0;
  double norm_drift_ = 0.0;
};

struct EvolveReport {
  int n_steps = 0;
  double final_time = 0.0;
  double discarded_weight = 0.0;
  double norm_drift = 0.0;
  std::vector<std::string> warnings;
};

// drive the state to t_total in steps of cfg.dt (last step counted by
// ceil(t_total/dt)); the observer fires at t = 0, every `stride` steps, and
// at the final step.  t_total = 0 produces the initial snapshot only.
EvolveReport evolve(
    mps::MPSState& state, const model::SystemParams& params,
    const chain::ChainCoefficients& chain, const TebdConfig& cfg,
    double t_total, int stride,
    const std::function<void(int, double, const mps::MPSState&)>& observer);

} // namespace kerrcav::tebd
