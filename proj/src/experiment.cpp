#include "chemokin/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>

#include <fmt/format.h>

#include "chemokin/elliptic.hpp"
#include "chemokin/kinetic.hpp"
#include "chemokin/svg_plot.hpp"
#include "chemokin/wasserstein.hpp"
#include "json.hpp"

#ifndef CHEMOKIN_VERSION
#define CHEMOKIN_VERSION "dev"
#endif

namespace chemokin {

using nlohmann::json;

const char* to_string(Solver s) {
  switch (s) {
    case Solver::kinetic: return "kinetic";
    case Solver::macro_grid: return "macro-grid";
    case Solver::macro_particles: return "macro-particles";
  }
  return "?";
}

namespace {

MacroParams macro_params(const ExperimentConfig& c, const TurningModel& model) {
  MacroParams p;
  p.model = model;
  p.cfl = c.macro.cfl;
  p.dt = c.macro.dt.value_or(max_stable_dt(c.grid.grid(), model, c.macro.cfl));
  p.t_end = c.t_end;
  p.merge_tol = c.macro.merge_tol;
  return p;
}

ProbeRecord grid_probe(double t, const Field& rho, const TurningModel& model) {
  Potential pot = solve_potential(rho);
  return {t, rho, std::move(pot.S), std::move(pot.dS), std::nullopt, std::nullopt, std::nullopt,
          diagnose(t, rho, model)};
}

std::string time_tag(double t) { return fmt::format("{:.6g}", t); }

}  // namespace

RunRecord simulate(const ExperimentConfig& c, Solver solver, std::optional<double> eps) {
  const TurningModel model(c.model);
  const Grid grid = c.grid.grid();
  const Field rho0 = initial_density(c);

  RunRecord run;
  run.label = c.name;
  run.solver = solver;
  run.initial_mass = rho0.mass();
  run.initial_max = rho0.max();
  run.symmetric_compact = is_symmetric_compact(rho0);

  switch (solver) {
    case Solver::kinetic: {
      if (!eps) throw std::invalid_argument("kinetic run needs eps");
      run.eps = eps;
      KineticParams p;
      p.eps = *eps;
      p.model = model;
      p.t_end = c.t_end;
      p.rho_ceiling = c.rho_ceiling;
      p.mollify_initial = c.mollify;
      const KineticRun k = c.initial.kind == "atoms"
                               ? run_kinetic(initial_measure(c), grid, p, c.probes)
                               : run_kinetic(rho0, p, c.probes);
      for (const KineticSnapshot& s : k.snapshots) {
        const double t = s.state.t;
        run.probes.push_back({t, s.state.density(), s.S, s.dS, s.state.f_plus, s.state.f_minus,
                              std::nullopt, diagnose(t, s.state, model)});
      }
      run.dt = k.dt;
      run.steps = k.steps;
      run.outflow = k.outflow;
      run.aborted = k.aborted;
      run.abort_reason = k.abort_reason;
      break;
    }
    case Solver::macro_grid: {
      const MacroParams p = macro_params(c, model);
      const MacroGridRun g = run_macro_grid(rho0, p, c.probes);
      for (const GridSnapshot& s : g.snapshots) run.probes.push_back(grid_probe(s.t, s.rho, model));
      run.dt = p.dt;
      run.steps = g.steps;
      run.outflow = g.outflow;
      break;
    }
    case Solver::macro_particles: {
      const MacroParams p = macro_params(c, model);
      const ParticleMeasure mu0 = initial_measure(c);
      run.initial_mass = mu0.mass();
      const ParticleRun pr = run_macro_particles(mu0, p, c.probes);
      for (const ParticleSnapshot& s : pr.snapshots) {
        Field S(grid), dS(grid);
        s.measure.potential_on_grid(grid, S.values(), dS.values());
        run.probes.push_back({s.t, s.measure.deposit(grid), std::move(S), std::move(dS),
                              std::nullopt, std::nullopt, s.measure,
                              diagnose(s.t, s.measure, grid, model)});
      }
      run.merges = pr.merges;
      run.dt = p.dt;
      run.steps = pr.steps;
      break;
    }
  }
  return run;
}

CsvTable ConvergenceTable::csv() const {
  std::vector<std::string> header{"eps"};
  for (const char* col : {"w1", "s_linf", "ds_l1"}) {
    for (double t : probes) header.push_back(fmt::format("{}_t{}", col, time_tag(t)));
  }
  CsvTable table(std::move(header));
  for (const ConvergenceRow& r : rows) {
    std::vector<std::string> cells{format_number(r.eps)};
    for (const auto* v : {&r.w1, &r.s_linf, &r.ds_l1}) {
      for (double x : *v) cells.push_back(format_number(x));
    }
    table.add_row(std::move(cells));
  }
  return table;
}

CsvTable ConvergenceTable::flags_csv() const {
  CsvTable table({"t", "w1_monotone", "s_lipschitz"});
  for (std::size_t k = 0; k < probes.size(); ++k) {
    table.add_row({format_number(probes[k]), w1_monotone[k] ? "true" : "false",
                   s_lipschitz[k] ? "true" : "false"});
  }
  return table;
}

ConvergenceTable convergence_table(const std::vector<RunRecord>& members, const RunRecord& reference) {
  ConvergenceTable table;
  const std::size_t np = reference.probes.size();
  for (const ProbeRecord& p : reference.probes) table.probes.push_back(p.t);

  std::vector<const RunRecord*> sorted;
  for (const RunRecord& m : members) {
    if (!m.eps) throw std::invalid_argument("convergence table: member '" + m.label + "' has no eps");
    if (m.probes.size() != np) {
      throw std::invalid_argument("convergence table: member '" + m.label + "' has " +
                                  std::to_string(m.probes.size()) + " probes, reference has " +
                                  std::to_string(np));
    }
    for (std::size_t k = 0; k < np; ++k) {
      if (!(m.probes[k].rho.grid() == reference.probes[k].rho.grid())) {
        throw std::invalid_argument("convergence table: member '" + m.label +
                                    "' is on a different grid than the reference");
      }
    }
    sorted.push_back(&m);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RunRecord* a, const RunRecord* b) { return *a->eps > *b->eps; });

  table.w1_monotone.assign(np, true);
  table.s_lipschitz.assign(np, true);
  for (const RunRecord* m : sorted) {
    ConvergenceRow row;
    row.eps = *m->eps;
    for (std::size_t k = 0; k < np; ++k) {
      const ProbeRecord& a = m->probes[k];
      const ProbeRecord& b = reference.probes[k];
      const double w1 = b.atoms ? w1_distance(a.rho, *b.atoms) : w1_distance(a.rho, b.rho);
      row.w1.push_back(w1);
      row.s_linf.push_back((a.S - b.S).max_abs());
      row.ds_l1.push_back((a.dS - b.dS).l1());
      const double slack = 0.5 * reference.initial_mass * a.rho.grid().dx();
      if (row.s_linf.back() > 0.5 * w1 + slack) table.s_lipschitz[k] = false;
      if (!table.rows.empty()) {
        const double prev = table.rows.back().w1[k];
        if (w1 > prev * (1.0 + 1e-12) + 1e-15) table.w1_monotone[k] = false;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::filesystem::path output_dir_for(const ExperimentConfig& c) {
  if (const char* root = std::getenv("CHEMOKIN_OUTPUT_ROOT"); root && *root) {
    return std::filesystem::path(root) / c.name;
  }
  return c.output_dir;
}

namespace {

LinePlot probe_overlay(const RunRecord& run, bool gradient) {
  LinePlot plot;
  plot.title = fmt::format("{} ({}{})", gradient ? "dS/dx" : "rho", to_string(run.solver),
                           run.eps ? fmt::format(", eps = {}", format_number(*run.eps)) : "");
  plot.x_label = "x";
  plot.y_label = gradient ? "dS/dx" : "rho";
  for (const ProbeRecord& p : run.probes) {
    const Field& f = gradient ? p.dS : p.rho;
    plot.series.push_back({fmt::format("t = {:.4g}", p.t), f.grid().centers(),
                           std::vector<double>(f.values().begin(), f.values().end())});
  }
  return plot;
}

std::string linf_cell(const DiagnosticsRow& d) {
  return d.linf ? format_number(*d.linf) : std::string("blown-up");
}

}  // namespace

void write_run(const RunRecord& run, const std::filesystem::path& dir) {
  for (std::size_t k = 0; k < run.probes.size(); ++k) {
    const ProbeRecord& p = run.probes[k];
    const Grid& g = p.rho.grid();
    CsvTable snap({"x", "rho", "S", "dS", "f_plus", "f_minus"});
    for (std::size_t i = 0; i < g.size(); ++i) {
      snap.add_row({format_number(g.center(i)), format_number(p.rho[i]), format_number(p.S[i]),
                    format_number(p.dS[i]), p.f_plus ? format_number((*p.f_plus)[i]) : "",
                    p.f_minus ? format_number((*p.f_minus)[i]) : ""});
    }
    snap.write(dir / fmt::format("snapshot_{:02d}_t{}.csv", k, time_tag(p.t)));
    if (p.atoms) {
      CsvTable atoms({"x", "w"});
      for (const Atom& a : p.atoms->atoms()) atoms.add_row({format_number(a.x), format_number(a.w)});
      atoms.write(dir / fmt::format("atoms_{:02d}_t{}.csv", k, time_tag(p.t)));
    }
  }

  CsvTable diag({"t", "mass", "linf", "energy_field", "energy_pairing", "osl_sup", "osl_bound",
                 "flux_res", "eq_res", "w1_ref"});
  for (const ProbeRecord& p : run.probes) {
    const DiagnosticsRow& d = p.diagnostics;
    diag.add_row({format_number(d.t), format_number(d.mass), linf_cell(d), format_number(d.energy_field),
                  format_number(d.energy_pairing), format_number(d.osl_sup), format_number(d.osl_bound),
                  format_number(d.flux_res), format_number(d.eq_res), format_number(d.w1_ref)});
  }
  diag.write(dir / "diagnostics.csv");

  if (run.solver == Solver::macro_particles) {
    CsvTable merges({"t", "x", "w", "atoms"});
    for (const MergeEvent& e : run.merges) {
      merges.add_row({format_number(e.t), format_number(e.x), format_number(e.w), std::to_string(e.atoms)});
    }
    merges.write(dir / "merges.csv");
  }

  if (!run.probes.empty()) {
    write_text_file(dir / "rho_probes.svg", render_svg(probe_overlay(run, false)));
    write_text_file(dir / "dS_probes.svg", render_svg(probe_overlay(run, true)));
  }
}

namespace {

json run_summary(const RunRecord& run, const std::string& subdir, const TurningModel& model) {
  json j;
  j["label"] = run.label;
  j["dir"] = subdir;
  j["solver"] = to_string(run.solver);
  j["eps"] = run.eps ? json(*run.eps) : json(nullptr);
  j["dt"] = run.dt;
  j["steps"] = run.steps;
  j["initial_mass"] = run.initial_mass;
  j["outflow"] = run.outflow;
  j["final_mass"] = run.probes.empty() ? json(nullptr) : json(run.probes.back().diagnostics.mass);
  j["aborted"] = run.aborted;
  j["abort_reason"] = run.abort_reason;
  j["last_valid_probe"] = run.probes.empty() ? json(nullptr) : json(run.probes.back().t);
  j["merges"] = run.merges.size();

  bool osl = true;
  for (const ProbeRecord& p : run.probes) {
    osl = osl && OslCheck{p.diagnostics.osl_sup, p.diagnostics.osl_bound}.holds();
  }
  j["osl_holds"] = osl;

  if (!run.probes.empty()) {
    std::vector<double> t, E;
    for (const ProbeRecord& p : run.probes) {
      t.push_back(p.t);
      E.push_back(p.diagnostics.energy_field);
    }
    const EnergyGrowth growth = energy_growth_monitor(t, E, run.symmetric_compact);
    j["energy"] = {{"min_rate", growth.min_rate},
                   {"envelope_slope", growth.envelope_slope},
                   {"symmetric_compact", growth.symmetric_compact},
                   {"cap", 0.5 * run.initial_mass * run.initial_mass}};

    std::optional<double> observed;
    if (run.solver == Solver::macro_particles) {
      if (!run.merges.empty()) observed = run.merges.front().t;
    } else {
      for (const ProbeRecord& p : run.probes) {
        if (is_concentrated(p.rho)) {
          observed = p.t;
          break;
        }
      }
    }
    const BlowupBracket b =
        blowup_bracket(run.initial_max, run.initial_mass, E.front(), growth.envelope_slope, model, observed);
    j["blowup"] = {{"lower", b.lower},
                   {"upper", b.upper ? json(*b.upper) : json(nullptr)},
                   {"observed", b.observed ? json(*b.observed) : json(nullptr)}};

    const double R = run.probes.front().dS.max_abs();
    j["zeta"] = R > 0.0 ? json(model.coercivity(R)) : json(nullptr);
  }
  return j;
}

// Least-squares slope of log(eq_res) against log(eps) at the last probe.
std::optional<double> eq_res_slope(const std::vector<RunRecord>& runs) {
  std::vector<std::pair<double, double>> pts;
  for (const RunRecord& r : runs) {
    if (!r.eps || r.probes.empty() || !r.probes.back().diagnostics.eq_res) continue;
    const double e = *r.probes.back().diagnostics.eq_res;
    if (e > 0.0) pts.emplace_back(std::log(*r.eps), std::log(e));
  }
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (auto [x, y] : pts) mx += x, my += y;
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  return sxx > 0 ? std::optional<double>(sxy / sxx) : std::nullopt;
}

std::string member_label(double eps) { return "eps_" + format_number(eps); }

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c, Action action,
                                std::optional<std::filesystem::path> dir) {
  const auto start = std::chrono::steady_clock::now();
  const TurningModel model(c.model);
  ExperimentResult result;
  result.dir = dir ? *dir : output_dir_for(c);

  const bool multi = action != Action::run || c.mode == Mode::sweep || c.mode == Mode::compare;
  const bool compare = action == Action::compare || c.mode == Mode::compare;
  Reference reference = c.reference;
  if (compare && reference == Reference::none) reference = Reference::smallest_eps;

  json manifest;
  manifest["name"] = c.name;
  manifest["description"] = c.description;
  manifest["version"] = CHEMOKIN_VERSION;
  manifest["action"] = action == Action::run ? "run" : action == Action::sweep ? "sweep" : "compare";
  manifest["config"] = json::parse(config_to_json(c));

  if (!multi) {
    Solver solver = Solver::kinetic;
    if (c.mode == Mode::macro_grid) solver = Solver::macro_grid;
    if (c.mode == Mode::macro_particles) solver = Solver::macro_particles;
    if (solver == Solver::kinetic && !c.eps) {
      throw ConfigError(std::vector<ConfigIssue>{{"/eps", "kinetic mode needs eps"}});
    }
    RunRecord run = simulate(c, solver, solver == Solver::kinetic ? c.eps : std::nullopt);
    write_run(run, result.dir);
    manifest["runs"] = json::array({run_summary(run, ".", model)});
    result.aborted = run.aborted;
    result.runs.push_back(std::move(run));
  } else {
    if (c.eps_list.empty()) {
      throw ConfigError(std::vector<ConfigIssue>{{"/eps_list", "sweep and compare need eps_list"}});
    }
    std::vector<std::future<RunRecord>> jobs;
    for (double eps : c.eps_list) {
      jobs.push_back(std::async(std::launch::async, [&c, eps] {
        RunRecord r = simulate(c, Solver::kinetic, eps);
        r.label = member_label(eps);
        return r;
      }));
    }
    std::optional<std::future<RunRecord>> ref_job;
    if (reference == Reference::macro_particles || reference == Reference::macro_grid) {
      const Solver s = reference == Reference::macro_grid ? Solver::macro_grid : Solver::macro_particles;
      ref_job = std::async(std::launch::async, [&c, s] {
        RunRecord r = simulate(c, s);
        r.label = "ref";
        return r;
      });
    }
    for (auto& j : jobs) result.runs.push_back(j.get());
    if (ref_job) {
      result.reference = ref_job->get();
    } else if (reference == Reference::smallest_eps) {
      const auto it = std::min_element(result.runs.begin(), result.runs.end(),
                                       [](const RunRecord& a, const RunRecord& b) { return *a.eps < *b.eps; });
      result.reference = *it;
      result.reference->label = "ref";
    }
    for (const RunRecord& r : result.runs) result.aborted = result.aborted || r.aborted;

    json conv = nullptr;
    if (result.reference) {
      if (result.aborted) {
        conv = {{"skipped", "a member aborted; probe sets differ"}};
      } else {
        result.convergence = convergence_table(result.runs, *result.reference);
        for (RunRecord& r : result.runs) {
          const auto row = std::find_if(result.convergence->rows.begin(), result.convergence->rows.end(),
                                        [&](const ConvergenceRow& cr) { return cr.eps == *r.eps; });
          for (std::size_t k = 0; k < r.probes.size(); ++k) r.probes[k].diagnostics.w1_ref = row->w1[k];
        }
        result.convergence->csv().write(result.dir / "convergence.csv");
        result.convergence->flags_csv().write(result.dir / "convergence_flags.csv");
        conv = {{"file", "convergence.csv"},
                {"flags_file", "convergence_flags.csv"},
                {"reference", to_string(reference)},
                {"w1_monotone", result.convergence->w1_monotone},
                {"s_lipschitz", result.convergence->s_lipschitz}};
      }
      const auto slope = eq_res_slope(result.runs);
      if (slope) conv["eq_res_loglog_slope"] = *slope;
    }
    manifest["convergence"] = conv;

    json runs = json::array();
    for (const RunRecord& r : result.runs) {
      write_run(r, result.dir / r.label);
      runs.push_back(run_summary(r, r.label, model));
    }
    manifest["runs"] = runs;
    if (result.reference) {
      write_run(*result.reference, result.dir / "ref");
      manifest["reference"] = run_summary(*result.reference, "ref", model);
    }

    // Overlays across eps at the last probe every member reached.
    std::size_t last = std::numeric_limits<std::size_t>::max();
    for (const RunRecord& r : result.runs) last = std::min(last, r.probes.size());
    if (last > 0 && last != std::numeric_limits<std::size_t>::max()) {
      const std::size_t k = last - 1;
      for (bool gradient : {false, true}) {
        LinePlot plot;
        plot.title = fmt::format("{} across eps, t = {:.4g}", gradient ? "dS/dx" : "rho",
                                 result.runs.front().probes[k].t);
        plot.x_label = "x";
        plot.y_label = gradient ? "dS/dx" : "rho";
        for (const RunRecord& r : result.runs) {
          const Field& f = gradient ? r.probes[k].dS : r.probes[k].rho;
          plot.series.push_back({"eps = " + format_number(*r.eps), f.grid().centers(),
                                 std::vector<double>(f.values().begin(), f.values().end())});
        }
        // Deposited atoms would flatten every other curve; only potentials
        // of a particle reference are drawn.
        if (result.reference && k < result.reference->probes.size() &&
            (gradient || !result.reference->probes[k].atoms)) {
          const Field& f = gradient ? result.reference->probes[k].dS : result.reference->probes[k].rho;
          plot.series.push_back({std::string("limit (") + to_string(result.reference->solver) + ")",
                                 f.grid().centers(),
                                 std::vector<double>(f.values().begin(), f.values().end())});
        }
        write_text_file(result.dir / (gradient ? "dS_eps.svg" : "rho_eps.svg"), render_svg(plot));
      }
    }
  }

  manifest["aborted"] = result.aborted;
  manifest["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text_file(result.dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace chemokin
