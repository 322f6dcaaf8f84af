#pragma once

// Single-document JSON run configuration with strict schema checking:
// unknown keys are errors, all violations are reported together, and the
// canonical document is hashed so a manifest can reproduce the run.

#include "kerrcav/model.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace kerrcav::config {

struct FrameSettings {
  std::vector<double> times;
  int points = 101;
  double half_width = 0.0; // 0 = choose from the steady occupation
};

struct SweepSettings {
  std::vector<double> drives;
  bool tebd_end_state = false;
  std::vector<model::InitialState> initial_states;
};

struct LindbladSettings {
  int dim = 30;
  double dt = 1e-3;
};

struct CompareTolerances {
  double field = 0.02;
  double occupation = 0.02;
  double g2 = 0.02;
  double non_gaussianity = 0.02;
};

struct RunConfig {
  int schema_version = 1;
  model::SystemParams system;
  model::InitialState initial;
  model::SimulationConfig sim;
  double lambda_floor = 1e-12;
  bool have_frames = false;
  FrameSettings frames;
  bool have_sweep = false;
  SweepSettings sweep;
  LindbladSettings lindblad;
  CompareTolerances tolerances;
  nlohmann::json document; // the config document as given
  std::string hash_hex;    // FNV-1a 64 of the sorted-key serialization
};

// carries every schema violation found, not only the first
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// parse and validate a config document; a run manifest (recognized by its
// "config" field) is unwrapped so manifests re-run directly
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

std::string fnv1a64_hex(const std::string& bytes);

} // namespace kerrcav::config
