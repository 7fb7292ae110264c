#include "chemokin/presets.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace chemokin {

namespace {

std::vector<Preset> build() {
  std::vector<Preset> out;
  out.push_back({"fig2_sweep", "eps sweep on a centered Gaussian against the sticky-particle limit",
                 R"({
  "name": "fig2_sweep",
  "description": "Centered Gaussian, eps in {4e-2, 2e-3, 1e-4}, compared with the macroscopic particle solution",
  "mode": "sweep",
  "grid": {"x_min": -2, "x_max": 2, "n": 1000},
  "model": {"phi0": 1, "alpha": 1, "c": 1},
  "eps_list": [4e-2, 2e-3, 1e-4],
  "initial": {"kind": "gaussian", "center": 0, "sigma": 0.2, "mass": 4},
  "t_end": 80,
  "probes": [0.4, 1.6, 6.4, 25.6, 80],
  "reference": "macro-particles"
})"});
  out.push_back({"ecoli", "physical units: c = 20 um/s, x0 = 1 cm, phi0 in {0.05, 1, 20} 1/s, 80 s",
                 R"({
  "name": "ecoli",
  "description": "E. coli scales converted to eps = c/(phi0 x0) and t = t_s c/x0",
  "mode": "sweep",
  "grid": {"x_min": 0, "x_max": 1, "n": 1000},
  "physical": {"c": 20e-6, "x0": 0.01, "phi0": [0.05, 1, 20], "t_end": 80, "probes": [10, 20, 40, 80]},
  "initial": {"kind": "gaussian", "center": 0.5, "sigma": 0.06, "mass": 4},
  "reference": "macro-particles"
})"});
  out.push_back({"kinetic_gaussian", "single kinetic run at eps = 1e-2",
                 R"({
  "name": "kinetic_gaussian",
  "mode": "kinetic",
  "grid": {"x_min": -3, "x_max": 3, "n": 600},
  "eps": 1e-2,
  "initial": {"kind": "gaussian", "center": 0, "sigma": 0.3, "mass": 2},
  "t_end": 4,
  "probes": [0, 1, 2, 4]
})"});
  out.push_back({"two_bumps", "two unequal Gaussians merging, kinetic at eps = 1e-2",
                 R"({
  "name": "two_bumps",
  "mode": "kinetic",
  "grid": {"x_min": -2, "x_max": 2, "n": 800},
  "eps": 1e-2,
  "initial": {"kind": "two-bumps", "centers": [-0.6, 0.6], "sigma": 0.15, "masses": [1, 1.5]},
  "t_end": 6,
  "probes": [0, 1, 2, 4, 6]
})"});
  out.push_back({"blowup_bump", "limit equation on the grid for a compact symmetric bump",
                 R"({
  "name": "blowup_bump",
  "mode": "macro-grid",
  "grid": {"x_min": -1, "x_max": 1, "n": 801},
  "initial": {"kind": "bump", "center": 0, "delta": 0.5, "mass": 1},
  "t_end": 1,
  "probes": [0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.75, 1]
})"});
  out.push_back({"blowup_particles", "sticky particles from the same bump until a single atom remains",
                 R"({
  "name": "blowup_particles",
  "mode": "macro-particles",
  "grid": {"x_min": -1, "x_max": 1, "n": 801},
  "initial": {"kind": "bump", "center": 0, "delta": 0.5, "mass": 1},
  "macro": {"particles": 400},
  "t_end": 4,
  "probes": [0, 0.25, 0.5, 1, 2, 4]
})"});
  out.push_back({"two_atoms", "two unit atoms at -0.8 and 0.8 collapse onto the origin",
                 R"({
  "name": "two_atoms",
  "mode": "macro-particles",
  "grid": {"x_min": -2, "x_max": 2, "n": 400},
  "initial": {"kind": "atoms", "atoms": [[-0.8, 1], [0.8, 1]]},
  "t_end": 6,
  "probes": [0, 1, 2, 3, 4, 5, 6]
})"});
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

ExperimentConfig load_config(const std::string& name_or_path) {
  if (auto p = find_preset(name_or_path)) return parse_config(p->json);
  const std::filesystem::path path(name_or_path);
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(std::vector<ConfigIssue>{
        {"", "'" + name_or_path + "' is neither a preset nor a readable file"}});
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string base = path.has_parent_path() ? path.parent_path().string() : ".";
  return parse_config(ss.str(), base);
}

}  // namespace chemokin
