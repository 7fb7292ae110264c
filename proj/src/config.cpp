#include "chemokin/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "chemokin/kinetic.hpp"
#include "chemokin/macro.hpp"
#include "json.hpp"

namespace chemokin {

using nlohmann::json;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kinetic: return "kinetic";
    case Mode::macro_grid: return "macro-grid";
    case Mode::macro_particles: return "macro-particles";
    case Mode::sweep: return "sweep";
    case Mode::compare: return "compare";
  }
  return "?";
}

const char* to_string(Reference r) {
  switch (r) {
    case Reference::none: return "none";
    case Reference::macro_particles: return "macro-particles";
    case Reference::macro_grid: return "macro-grid";
    case Reference::smallest_eps: return "smallest-eps";
  }
  return "?";
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string s = "invalid configuration:";
  for (const auto& i : issues) s += "\n  " + (i.path.empty() ? "/" : i.path) + ": " + i.message;
  return s;
}

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& path, const std::string& msg) { issues.push_back({path, msg}); }

  void only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) fail(path + "/" + k, "unknown key");
    }
  }

  bool is_object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(path + "/" + key, "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(path + "/" + key, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  void positive(const json& obj, const std::string& key, const std::string& path, double& out) {
    if (auto v = number(obj, key, path)) {
      if (*v > 0.0) {
        out = *v;
      } else {
        fail(path + "/" + key, "must be > 0");
      }
    }
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& key,
                                             const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      fail(path + "/" + key, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(path + "/" + key + "/" + std::to_string(i), "expected a finite number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) {
      fail(path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }
};

void read_grid(Reader& r, const json& j, GridSpec& g) {
  if (!r.is_object(j, "/grid")) return;
  r.only(j, "/grid", {"x_min", "x_max", "n"});
  if (auto v = r.number(j, "x_min", "/grid")) g.x_min = *v;
  if (auto v = r.number(j, "x_max", "/grid")) g.x_max = *v;
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 2) {
      r.fail("/grid/n", "expected an integer >= 2");
    } else {
      g.n = j["n"].get<std::size_t>();
    }
  }
  if (!(g.x_max > g.x_min)) r.fail("/grid", "x_max must exceed x_min");
}

void read_model(Reader& r, const json& j, TurningParams& m) {
  if (!r.is_object(j, "/model")) return;
  r.only(j, "/model", {"phi0", "alpha", "c"});
  r.positive(j, "phi0", "/model", m.phi0);
  r.positive(j, "alpha", "/model", m.alpha);
  r.positive(j, "c", "/model", m.c);
}

void read_initial(Reader& r, const json& j, InitialSpec& s, const std::string& base_dir) {
  const std::string p = "/initial";
  if (!r.is_object(j, p)) return;
  const auto kind = r.string(j, "kind", p);
  if (!kind) {
    r.fail(p + "/kind", "missing required key");
    return;
  }
  s.kind = *kind;
  if (s.kind == "gaussian") {
    r.only(j, p, {"kind", "center", "sigma", "mass"});
    if (auto v = r.number(j, "center", p)) s.center = *v;
    r.positive(j, "sigma", p, s.sigma);
    r.positive(j, "mass", p, s.mass);
  } else if (s.kind == "two-bumps") {
    r.only(j, p, {"kind", "centers", "sigma", "masses"});
    r.positive(j, "sigma", p, s.sigma);
    if (auto v = r.numbers(j, "centers", p)) s.centers = *v;
    if (auto v = r.numbers(j, "masses", p)) s.masses = *v;
    if (s.centers.size() != 2) r.fail(p + "/centers", "expected two centers");
    if (s.masses.size() != 2) r.fail(p + "/masses", "expected two masses");
    for (double m : s.masses) {
      if (!(m > 0.0)) r.fail(p + "/masses", "masses must be > 0");
    }
  } else if (s.kind == "bump") {
    r.only(j, p, {"kind", "center", "delta", "mass"});
    if (auto v = r.number(j, "center", p)) s.center = *v;
    r.positive(j, "delta", p, s.delta);
    r.positive(j, "mass", p, s.mass);
  } else if (s.kind == "atoms") {
    r.only(j, p, {"kind", "atoms"});
    if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty()) {
      r.fail(p + "/atoms", "expected a non-empty array of [x, w] pairs");
      return;
    }
    const json& a = j["atoms"];
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string ap = p + "/atoms/" + std::to_string(i);
      if (!a[i].is_array() || a[i].size() != 2 || !a[i][0].is_number() || !a[i][1].is_number()) {
        r.fail(ap, "expected [x, w]");
        continue;
      }
      const double x = a[i][0].get<double>();
      const double w = a[i][1].get<double>();
      if (!std::isfinite(x) || !(w > 0.0) || !std::isfinite(w)) {
        r.fail(ap, "need finite x and w > 0");
        continue;
      }
      s.atoms.push_back({x, w});
    }
  } else if (s.kind == "file") {
    r.only(j, p, {"kind", "path"});
    const auto path = r.string(j, "path", p);
    if (!path) {
      r.fail(p + "/path", "missing required key");
      return;
    }
    std::filesystem::path fp(*path);
    if (fp.is_relative()) fp = std::filesystem::path(base_dir) / fp;
    s.path = fp.string();
    if (!std::filesystem::exists(fp)) r.fail(p + "/path", "file not found: " + s.path);
  } else {
    r.fail(p + "/kind", "unknown initial kind '" + s.kind +
                            "' (expected gaussian, two-bumps, bump, atoms or file)");
  }
}

void read_macro(Reader& r, const json& j, MacroSpec& m) {
  if (!r.is_object(j, "/macro")) return;
  r.only(j, "/macro", {"cfl", "dt", "merge_tol", "particles"});
  if (auto v = r.number(j, "cfl", "/macro")) {
    if (*v > 0.0 && *v <= 1.0) {
      m.cfl = *v;
    } else {
      r.fail("/macro/cfl", "must lie in (0, 1]");
    }
  }
  if (auto v = r.number(j, "dt", "/macro")) {
    if (*v > 0.0) {
      m.dt = *v;
    } else {
      r.fail("/macro/dt", "must be > 0");
    }
  }
  if (auto v = r.number(j, "merge_tol", "/macro")) {
    if (*v >= 0.0) {
      m.merge_tol = *v;
    } else {
      r.fail("/macro/merge_tol", "must be >= 0");
    }
  }
  if (j.contains("particles")) {
    if (!j["particles"].is_number_integer() || j["particles"].get<long long>() < 0) {
      r.fail("/macro/particles", "expected a non-negative integer");
    } else {
      m.particles = j["particles"].get<std::size_t>();
    }
  }
}

void read_physical(Reader& r, const json& j, PhysicalSpec& ph) {
  const std::string p = "/physical";
  if (!r.is_object(j, p)) return;
  r.only(j, p, {"c", "x0", "phi0", "t_end", "probes"});
  r.positive(j, "c", p, ph.c);
  r.positive(j, "x0", p, ph.x0);
  r.positive(j, "t_end", p, ph.t_end);
  if (auto v = r.numbers(j, "phi0", p)) ph.phi0 = *v;
  if (ph.phi0.empty()) r.fail(p + "/phi0", "expected a non-empty list of turning rates");
  for (double f : ph.phi0) {
    if (!(f > 0.0)) r.fail(p + "/phi0", "turning rates must be > 0");
  }
  if (auto v = r.numbers(j, "probes", p)) ph.probes = *v;
}

bool needs_eps_list(Mode m) { return m == Mode::sweep || m == Mode::compare; }

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::vector<ConfigIssue>{{"", std::string("malformed JSON: ") + e.what()}});
  }
  Reader r;
  ExperimentConfig c;
  if (!doc.is_object()) throw ConfigError(std::vector<ConfigIssue>{{"", "top level must be an object"}});
  r.only(doc, "", {"name", "description", "mode", "grid", "model", "eps", "eps_list", "initial",
                   "t_end", "probes", "output_dir", "macro", "reference", "rho_ceiling",
                   "mollify", "physical"});

  if (auto v = r.string(doc, "name", "")) {
    if (v->empty() || v->find_first_of("/\\") != std::string::npos) {
      r.fail("/name", "must be a non-empty name without path separators");
    } else {
      c.name = *v;
    }
  }
  if (auto v = r.string(doc, "description", "")) c.description = *v;

  if (const auto mode = r.string(doc, "mode", "")) {
    if (*mode == "kinetic") c.mode = Mode::kinetic;
    else if (*mode == "macro-grid") c.mode = Mode::macro_grid;
    else if (*mode == "macro-particles") c.mode = Mode::macro_particles;
    else if (*mode == "sweep") c.mode = Mode::sweep;
    else if (*mode == "compare") c.mode = Mode::compare;
    else r.fail("/mode", "unknown mode '" + *mode + "'");
  } else if (!doc.contains("mode")) {
    r.fail("/mode", "missing required key");
  }

  if (doc.contains("grid")) read_grid(r, doc["grid"], c.grid);
  if (doc.contains("model")) read_model(r, doc["model"], c.model);
  if (doc.contains("initial")) {
    read_initial(r, doc["initial"], c.initial, base_dir);
  } else {
    r.fail("/initial", "missing required key");
  }
  if (doc.contains("macro")) read_macro(r, doc["macro"], c.macro);
  if (doc.contains("physical")) {
    PhysicalSpec ph;
    read_physical(r, doc["physical"], ph);
    c.physical = ph;
  }

  if (auto v = r.number(doc, "eps", "")) {
    if (*v > 0.0) {
      c.eps = *v;
    } else {
      r.fail("/eps", "must be > 0");
    }
  }
  if (auto v = r.numbers(doc, "eps_list", "")) {
    for (double e : *v) {
      if (!(e > 0.0)) r.fail("/eps_list", "every eps must be > 0");
    }
    c.eps_list = *v;
  }
  bool have_t_end = false;
  if (auto v = r.number(doc, "t_end", "")) {
    if (*v > 0.0) {
      c.t_end = *v;
      have_t_end = true;
    } else {
      r.fail("/t_end", "must be > 0");
    }
  }
  std::optional<std::vector<double>> probes = r.numbers(doc, "probes", "");
  if (auto v = r.string(doc, "output_dir", "")) c.output_dir = *v;
  if (auto v = r.string(doc, "reference", "")) {
    if (*v == "none") c.reference = Reference::none;
    else if (*v == "macro-particles") c.reference = Reference::macro_particles;
    else if (*v == "macro-grid") c.reference = Reference::macro_grid;
    else if (*v == "smallest-eps") c.reference = Reference::smallest_eps;
    else r.fail("/reference", "unknown reference '" + *v + "'");
  }
  if (auto v = r.number(doc, "rho_ceiling", "")) {
    if (*v > 0.0) {
      c.rho_ceiling = *v;
    } else {
      r.fail("/rho_ceiling", "must be > 0");
    }
  }
  if (doc.contains("mollify")) {
    if (doc["mollify"].is_boolean()) {
      c.mollify = doc["mollify"].get<bool>();
    } else {
      r.fail("/mollify", "expected true or false");
    }
  }

  // Physical units fix eps, t_end and the probes.
  if (c.physical) {
    const PhysicalSpec& ph = *c.physical;
    if (c.eps || !c.eps_list.empty()) r.fail("/physical", "conflicts with eps / eps_list");
    if (have_t_end || probes) r.fail("/physical", "conflicts with t_end / probes");
    const double scale = ph.c / ph.x0;
    for (double f : ph.phi0) c.eps_list.push_back(ph.c / (f * ph.x0));
    if (c.eps_list.size() == 1) c.eps = c.eps_list.front();
    c.t_end = ph.t_end * scale;
    have_t_end = true;
    probes = std::vector<double>{};
    for (double t : ph.probes) probes->push_back(t * scale);
  }

  if (!have_t_end) r.fail("/t_end", "missing required key");
  c.probes = probes && !probes->empty() ? *probes : std::vector<double>{c.t_end};
  for (std::size_t i = 0; i < c.probes.size(); ++i) {
    if (!(c.probes[i] >= 0.0) || c.probes[i] > c.t_end * (1.0 + 1e-12)) {
      r.fail("/probes/" + std::to_string(i), "probe time must lie in [0, t_end]");
    }
  }
  std::sort(c.probes.begin(), c.probes.end());

  if (c.mode == Mode::kinetic && !c.eps) r.fail("/eps", "kinetic mode needs eps");
  if (needs_eps_list(c.mode) && c.eps_list.empty()) {
    r.fail("/eps_list", std::string(to_string(c.mode)) + " mode needs eps_list");
  }
  if (c.initial.kind == "atoms" && (c.mode == Mode::macro_grid)) {
    r.fail("/initial/kind", "atoms need a kinetic or particle run");
  }
  if (c.mode == Mode::compare && c.reference == Reference::none) {
    c.reference = Reference::smallest_eps;
  }
  if (c.output_dir.empty()) c.output_dir = "chemokin_out/" + c.name;

  if (c.macro.dt && r.issues.empty()) {
    const double stable = max_stable_dt(c.grid.grid(), TurningModel(c.model), c.macro.cfl);
    if (*c.macro.dt > stable) {
      r.fail("/macro/dt", "violates the CFL condition; need dt <= " + std::to_string(stable));
    }
  }

  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["description"] = c.description;
  j["mode"] = to_string(c.mode);
  j["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"n", c.grid.n}};
  j["model"] = {{"phi0", c.model.phi0}, {"alpha", c.model.alpha}, {"c", c.model.c}};
  if (c.eps) j["eps"] = *c.eps;
  if (!c.eps_list.empty()) j["eps_list"] = c.eps_list;
  json init = {{"kind", c.initial.kind}};
  if (c.initial.kind == "gaussian") {
    init["center"] = c.initial.center;
    init["sigma"] = c.initial.sigma;
    init["mass"] = c.initial.mass;
  } else if (c.initial.kind == "two-bumps") {
    init["centers"] = c.initial.centers;
    init["sigma"] = c.initial.sigma;
    init["masses"] = c.initial.masses;
  } else if (c.initial.kind == "bump") {
    init["center"] = c.initial.center;
    init["delta"] = c.initial.delta;
    init["mass"] = c.initial.mass;
  } else if (c.initial.kind == "atoms") {
    json a = json::array();
    for (const Atom& at : c.initial.atoms) a.push_back({at.x, at.w});
    init["atoms"] = a;
  } else {
    init["path"] = c.initial.path;
  }
  j["initial"] = init;
  j["t_end"] = c.t_end;
  j["probes"] = c.probes;
  j["output_dir"] = c.output_dir;
  json macro = {{"cfl", c.macro.cfl}, {"merge_tol", c.macro.merge_tol}, {"particles", c.macro.particles}};
  if (c.macro.dt) macro["dt"] = *c.macro.dt;
  j["macro"] = macro;
  j["reference"] = to_string(c.reference);
  if (std::isfinite(c.rho_ceiling)) j["rho_ceiling"] = c.rho_ceiling;
  j["mollify"] = c.mollify;
  if (c.physical) {
    j["physical"] = {{"c", c.physical->c},
                     {"x0", c.physical->x0},
                     {"phi0", c.physical->phi0},
                     {"t_end", c.physical->t_end},
                     {"probes", c.physical->probes}};
  }
  return j.dump(2);
}

namespace {

Field read_density_file(const std::string& path, const Grid& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<double> xs, rs;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0.0, rho = 0.0;
    if (!(ss >> x >> rho)) throw std::runtime_error("malformed line in " + path + ": " + line);
    if (rho < 0.0 || !std::isfinite(rho)) throw std::runtime_error("negative density in " + path);
    xs.push_back(x);
    rs.push_back(rho);
  }
  if (xs.size() < 2 || !std::is_sorted(xs.begin(), xs.end())) {
    throw std::runtime_error(path + ": need at least two rows with increasing x");
  }
  return Field::sample(g, [&](double x) {
    if (x < xs.front() || x > xs.back()) return 0.0;
    const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    if (k >= xs.size()) return rs.back();
    const double th = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1.0 - th) * rs[k - 1] + th * rs[k];
  });
}

double gaussian_at(double x, double x0, double sigma, double mass) {
  const double z = (x - x0) / sigma;
  return mass / (sigma * std::sqrt(2.0 * M_PI)) * std::exp(-0.5 * z * z);
}

// Sampled profiles are rescaled so the discrete mass is the configured one.
Field with_mass(Field f, double mass) {
  const double m = f.mass();
  if (m > 0.0) f *= mass / m;
  return f;
}

}  // namespace

Field initial_density(const ExperimentConfig& c) {
  const Grid g = c.grid.grid();
  const InitialSpec& s = c.initial;
  if (s.kind == "gaussian") {
    return with_mass(Field::sample(g, [&](double x) { return gaussian_at(x, s.center, s.sigma, 1.0); }),
                     s.mass);
  }
  if (s.kind == "two-bumps") {
    Field rho = with_mass(
        Field::sample(g, [&](double x) { return gaussian_at(x, s.centers[0], s.sigma, 1.0); }), s.masses[0]);
    rho += with_mass(Field::sample(g, [&](double x) { return gaussian_at(x, s.centers[1], s.sigma, 1.0); }),
                     s.masses[1]);
    return rho;
  }
  if (s.kind == "bump") {
    return with_mass(Field::sample(g,
                                   [&](double x) {
                                     const double z = (x - s.center) / s.delta;
                                     return std::abs(z) < 1.0 ? (1 - z * z) * (1 - z * z) : 0.0;
                                   }),
                     s.mass);
  }
  if (s.kind == "atoms") return ParticleMeasure(s.atoms).deposit(g);
  return read_density_file(s.path, g);
}

ParticleMeasure initial_measure(const ExperimentConfig& c) {
  if (c.initial.kind == "atoms") return ParticleMeasure(c.initial.atoms);
  const std::size_t n = c.macro.particles > 0 ? c.macro.particles : c.grid.n;
  return ParticleMeasure::from_quantiles(initial_density(c), n);
}

}  // namespace chemokin
