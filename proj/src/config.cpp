#include "kerrcav/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace kerrcav::config {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << "configuration invalid (" << issues.size() << " issue"
      << (issues.size() == 1 ? "" : "s") << "):";
  for (const auto& s : issues) out << "\n  - " << s;
  return out.str();
}

class Checker {
 public:
  explicit Checker(std::vector<std::string>& issues) : issues_(issues) {}

  void unknown_keys(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> known) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : known) {
        if (it.key() == k) {
          ok = true;
          break;
        }
      }
      if (!ok) issues_.push_back("unknown key '" + scope + it.key() + "'");
    }
  }

  bool want_object(const json& parent, const std::string& scope,
                   const char* key) {
    if (!parent.contains(key)) return false;
    if (!parent.at(key).is_object()) {
      issues_.push_back("'" + scope + key + "' must be an object");
      return false;
    }
    return true;
  }

  double number(const json& obj, const std::string& scope, const char* key,
                double fallback, bool* present = nullptr) {
    if (present != nullptr) *present = false;
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      issues_.push_back("'" + scope + key + "' must be a number");
      return fallback;
    }
    if (present != nullptr) *present = true;
    return v.get<double>();
  }

  int integer(const json& obj, const std::string& scope, const char* key,
              int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      issues_.push_back("'" + scope + key + "' must be an integer");
      return fallback;
    }
    return v.get<int>();
  }

  bool boolean(const json& obj, const std::string& scope, const char* key,
               bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      issues_.push_back("'" + scope + key + "' must be a boolean");
      return fallback;
    }
    return v.get<bool>();
  }

  void fail(const std::string& msg) { issues_.push_back(msg); }

 private:
  std::vector<std::string>& issues_;
};

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

RunConfig parse_config(const json& given) {
  const json* doc = &given;
  // a manifest embeds the original document under "config"
  if (given.is_object() && given.contains("config") &&
      given.contains("config_hash")) {
    doc = &given.at("config");
  }
  std::vector<std::string> issues;
  Checker ck(issues);
  RunConfig cfg;
  if (!doc->is_object()) {
    throw ConfigError({"top-level document must be a JSON object"});
  }
  const json& root = *doc;
  ck.unknown_keys(root, "",
                  {"schema_version", "system", "initial_state", "simulation",
                   "frames", "sweep", "lindblad", "compare"});

  if (!root.contains("schema_version")) {
    ck.fail("'schema_version' is required");
  } else if (!root.at("schema_version").is_number_integer()) {
    ck.fail("'schema_version' must be an integer");
  } else {
    cfg.schema_version = root.at("schema_version").get<int>();
    if (cfg.schema_version != 1) {
      ck.fail("unsupported schema_version " +
              std::to_string(cfg.schema_version) + " (supported: 1)");
    }
  }

  // ---- system ----
  if (!root.contains("system")) {
    ck.fail("'system' is required");
  } else if (ck.want_object(root, "", "system")) {
    const json& sys = root.at("system");
    ck.unknown_keys(sys, "system.",
                    {"delta", "chi2", "gamma", "drive", "cutoff"});
    cfg.system.delta = ck.number(sys, "system.", "delta", 0.0);
    cfg.system.chi2 = ck.number(sys, "system.", "chi2", 0.0);
    bool have_gamma = false;
    cfg.system.gamma = ck.number(sys, "system.", "gamma", 0.0, &have_gamma);
    if (!have_gamma && !sys.contains("gamma")) ck.fail("'system.gamma' is required");
    bool have_cutoff = false;
    cfg.system.cutoff = ck.number(sys, "system.", "cutoff", 0.0, &have_cutoff);
    if (!have_cutoff && !sys.contains("cutoff")) ck.fail("'system.cutoff' is required");
    if (!sys.contains("drive")) {
      ck.fail("'system.drive' is required");
    } else {
      const json& d = sys.at("drive");
      if (d.is_number()) {
        cfg.system.drive = model::cxd(d.get<double>(), 0.0);
      } else if (d.is_array() && d.size() == 2 && d.at(0).is_number() &&
                 d.at(1).is_number()) {
        cfg.system.drive =
            model::cxd(d.at(0).get<double>(), d.at(1).get<double>());
      } else {
        ck.fail("'system.drive' must be a number or a [re, im] pair");
      }
    }
    try {
      (void)cfg.system.validate();
    } catch (const std::invalid_argument& e) {
      ck.fail(std::string("system: ") + e.what());
    }
  }

  // ---- initial state ----
  if (root.contains("initial_state") &&
      ck.want_object(root, "", "initial_state")) {
    const json& ini = root.at("initial_state");
    ck.unknown_keys(ini, "initial_state.", {"amplitude", "phase"});
    const double amp = ck.number(ini, "initial_state.", "amplitude", 0.0);
    const double phase = ck.number(ini, "initial_state.", "phase", 0.0);
    if (amp < 0.0) {
      ck.fail("'initial_state.amplitude' must be >= 0");
    } else {
      cfg.initial = model::InitialState::make(amp, phase);
    }
  }

  // ---- simulation ----
  if (root.contains("simulation") && ck.want_object(root, "", "simulation")) {
    const json& sim = root.at("simulation");
    ck.unknown_keys(sim, "simulation.",
                    {"n_sites", "local_dim", "bond_dim", "dt", "t_total",
                     "snapshot_stride", "lambda_floor"});
    cfg.sim.n_sites = ck.integer(sim, "simulation.", "n_sites", cfg.sim.n_sites);
    cfg.sim.local_dim =
        ck.integer(sim, "simulation.", "local_dim", cfg.sim.local_dim);
    cfg.sim.bond_dim =
        ck.integer(sim, "simulation.", "bond_dim", cfg.sim.bond_dim);
    cfg.sim.dt = ck.number(sim, "simulation.", "dt", cfg.sim.dt);
    cfg.sim.t_total = ck.number(sim, "simulation.", "t_total", cfg.sim.t_total);
    cfg.sim.snapshot_stride = ck.integer(sim, "simulation.", "snapshot_stride",
                                         cfg.sim.snapshot_stride);
    cfg.lambda_floor =
        ck.number(sim, "simulation.", "lambda_floor", cfg.lambda_floor);
    if (cfg.lambda_floor < 0.0 || cfg.lambda_floor > 1e-2) {
      ck.fail("'simulation.lambda_floor' must lie in [0, 1e-2]");
    }
  }
  try {
    cfg.sim.validate();
  } catch (const std::invalid_argument& e) {
    ck.fail(std::string("simulation: ") + e.what());
  }

  // ---- wigner frames ----
  if (root.contains("frames") && ck.want_object(root, "", "frames")) {
    cfg.have_frames = true;
    const json& fr = root.at("frames");
    ck.unknown_keys(fr, "frames.", {"times", "points", "half_width"});
    if (!fr.contains("times") || !fr.at("times").is_array() ||
        fr.at("times").empty()) {
      ck.fail("'frames.times' must be a non-empty array of times");
    } else {
      for (const auto& t : fr.at("times")) {
        if (!t.is_number()) {
          ck.fail("'frames.times' entries must be numbers");
          break;
        }
        const double tv = t.get<double>();
        if (tv < 0.0 || tv > cfg.sim.t_total + 1e-12) {
          std::ostringstream msg;
          msg << "'frames.times' entry " << tv << " outside [0, t_total="
              << cfg.sim.t_total << "]";
          ck.fail(msg.str());
        }
        cfg.frames.times.push_back(tv);
      }
    }
    cfg.frames.points = ck.integer(fr, "frames.", "points", cfg.frames.points);
    if (cfg.frames.points < 2) ck.fail("'frames.points' must be >= 2");
    cfg.frames.half_width =
        ck.number(fr, "frames.", "half_width", cfg.frames.half_width);
    if (cfg.frames.half_width < 0.0) {
      ck.fail("'frames.half_width' must be >= 0 (0 selects automatically)");
    }
  }

  // ---- steady sweep ----
  if (root.contains("sweep") && ck.want_object(root, "", "sweep")) {
    cfg.have_sweep = true;
    const json& sw = root.at("sweep");
    ck.unknown_keys(sw, "sweep.",
                    {"drives", "tebd_end_state", "initial_states"});
    if (!sw.contains("drives") || !sw.at("drives").is_array() ||
        sw.at("drives").empty()) {
      ck.fail("'sweep.drives' must be a non-empty array of drive amplitudes");
    } else {
      for (const auto& e : sw.at("drives")) {
        if (!e.is_number()) {
          ck.fail("'sweep.drives' entries must be numbers");
          break;
        }
        const double ev = e.get<double>();
        if (ev <= 0.0) {
          ck.fail("'sweep.drives' entries must be > 0 (analytic path needs a "
                  "real positive drive)");
        }
        cfg.sweep.drives.push_back(ev);
      }
    }
    cfg.sweep.tebd_end_state =
        ck.boolean(sw, "sweep.", "tebd_end_state", false);
    if (sw.contains("initial_states")) {
      if (!sw.at("initial_states").is_array()) {
        ck.fail("'sweep.initial_states' must be an array");
      } else {
        int idx = 0;
        for (const auto& st : sw.at("initial_states")) {
          const std::string scope =
              "sweep.initial_states[" + std::to_string(idx) + "].";
          if (!st.is_object()) {
            ck.fail("'" + scope + "' entries must be objects");
            ++idx;
            continue;
          }
          ck.unknown_keys(st, scope, {"amplitude", "phase"});
          const double amp = ck.number(st, scope, "amplitude", 0.0);
          const double ph = ck.number(st, scope, "phase", 0.0);
          if (amp < 0.0) {
            ck.fail("'" + scope + "amplitude' must be >= 0");
          } else {
            cfg.sweep.initial_states.push_back(model::InitialState::make(amp, ph));
          }
          ++idx;
        }
      }
    }
    if (cfg.sweep.tebd_end_state && cfg.sweep.initial_states.empty()) {
      ck.fail("'sweep.tebd_end_state' requires at least one entry in "
              "'sweep.initial_states'");
    }
  }

  // ---- brute-force integrator settings ----
  if (root.contains("lindblad") && ck.want_object(root, "", "lindblad")) {
    const json& lb = root.at("lindblad");
    ck.unknown_keys(lb, "lindblad.", {"dim", "dt"});
    cfg.lindblad.dim = ck.integer(lb, "lindblad.", "dim", cfg.lindblad.dim);
    cfg.lindblad.dt = ck.number(lb, "lindblad.", "dt", cfg.lindblad.dt);
    if (cfg.lindblad.dim < 2) ck.fail("'lindblad.dim' must be >= 2");
    if (!(cfg.lindblad.dt > 0.0)) ck.fail("'lindblad.dt' must be > 0");
  }

  // ---- comparison tolerances ----
  if (root.contains("compare") && ck.want_object(root, "", "compare")) {
    const json& cp = root.at("compare");
    ck.unknown_keys(cp, "compare.",
                    {"field", "occupation", "g2", "non_gaussianity"});
    cfg.tolerances.field = ck.number(cp, "compare.", "field", cfg.tolerances.field);
    cfg.tolerances.occupation =
        ck.number(cp, "compare.", "occupation", cfg.tolerances.occupation);
    cfg.tolerances.g2 = ck.number(cp, "compare.", "g2", cfg.tolerances.g2);
    cfg.tolerances.non_gaussianity = ck.number(
        cp, "compare.", "non_gaussianity", cfg.tolerances.non_gaussianity);
    for (double t : {cfg.tolerances.field, cfg.tolerances.occupation,
                     cfg.tolerances.g2, cfg.tolerances.non_gaussianity}) {
      if (t < 0.0) {
        ck.fail("'compare' tolerances must be >= 0");
        break;
      }
    }
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  cfg.document = root;
  cfg.hash_hex = fnv1a64_hex(json(root).dump());
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  return parse_config(doc);
}

} // namespace kerrcav::config
