#include "kerrcav/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace kerrcav::traj {

Snapshot make_snapshot(double t, const obs::FockDensityMatrix& rho,
                       double trunc_error) {
  Snapshot s;
  s.t = t;
  s.mean_field = obs::mean_field(rho);
  s.occupation = obs::occupation(rho);
  try {
    s.g2 = obs::g2_zero(rho);
  } catch (const std::exception&) {
    s.g2 = std::numeric_limits<double>::quiet_NaN();
  }
  s.fidelity = obs::fidelity_to_classical(rho);
  try {
    s.non_gaussianity = obs::non_gaussianity(rho);
  } catch (const std::exception&) {
    s.non_gaussianity = std::numeric_limits<double>::quiet_NaN();
  }
  s.trunc_error = trunc_error;
  return s;
}

namespace {
void append_g17(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}
} // namespace

void write_trajectory_csv(const std::string& path,
                          const std::vector<Snapshot>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,re_mean_field,im_mean_field,occupation,g2,fidelity,"
         "non_gaussianity,trunc_error\n";
  std::string line;
  for (const Snapshot& s : rows) {
    line.clear();
    append_g17(line, s.t);
    line += ',';
    append_g17(line, s.mean_field.real());
    line += ',';
    append_g17(line, s.mean_field.imag());
    line += ',';
    append_g17(line, s.occupation);
    line += ',';
    append_g17(line, s.g2);
    line += ',';
    append_g17(line, s.fidelity);
    line += ',';
    append_g17(line, s.non_gaussianity);
    line += ',';
    append_g17(line, s.trunc_error);
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

cxd linear_cavity_field(const model::SystemParams& params, double t) {
  const cxd pole(0.5 * params.gamma, params.delta); // gamma/2 + i delta
  const cxd steady = params.drive / pole;
  return steady * (1.0 - std::exp(-pole * t));
}

} // namespace kerrcav::traj
