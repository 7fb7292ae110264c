#include <cstdio>
#include <exception>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "chemokin/experiment.hpp"
#include "chemokin/presets.hpp"

using namespace chemokin;

namespace {

enum Exit { ok = 0, config_error = 1, solver_abort = 2, io_error = 3 };

void print_issues(const ConfigError& e) {
  fmt::print(stderr, "configuration error:\n");
  for (const ConfigIssue& i : e.issues()) {
    fmt::print(stderr, "  {}: {}\n", i.path.empty() ? "/" : i.path, i.message);
  }
}

int execute(const std::string& source, Action action, const std::string& out) {
  const ExperimentConfig config = load_config(source);
  std::optional<std::filesystem::path> dir;
  if (!out.empty()) dir = out;
  const ExperimentResult r = run_experiment(config, action, dir);
  for (const RunRecord& run : r.runs) {
    fmt::print("{:<16} {:<16} steps {:>7}  probes {:>3}  mass {}{}\n", run.label, to_string(run.solver),
               run.steps, run.probes.size(),
               run.probes.empty() ? 0.0 : run.probes.back().diagnostics.mass,
               run.aborted ? "  ABORTED: " + run.abort_reason : "");
  }
  if (r.reference) {
    fmt::print("{:<16} {:<16} steps {:>7}  merges {}\n", "reference", to_string(r.reference->solver),
               r.reference->steps, r.reference->merges.size());
  }
  if (r.convergence) {
    for (const ConvergenceRow& row : r.convergence->rows) {
      fmt::print("eps {:<10} W1 at last probe {:.6g}\n", row.eps, row.w1.back());
    }
  }
  fmt::print("artifacts in {}\n", r.dir.string());
  return r.aborted ? solver_abort : ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic chemotaxis model and its aggregation limit"};
  app.require_subcommand(1);

  std::string source, out, preset_name;
  auto add_runner = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", source, "preset name or JSON file")->required();
    sub->add_option("-o,--out", out, "output directory (overrides config and CHEMOKIN_OUTPUT_ROOT)");
    return sub;
  };
  CLI::App* run = add_runner("run", "run the configured mode");
  CLI::App* sweep = add_runner("sweep", "run every eps of the list and the reference");
  CLI::App* compare = add_runner("compare", "sweep plus the convergence table against the reference");

  CLI::App* presets_cmd = app.add_subcommand("presets", "built-in configurations");
  presets_cmd->require_subcommand(1);
  CLI::App* list = presets_cmd->add_subcommand("list", "list preset names");
  CLI::App* show = presets_cmd->add_subcommand("show", "print a preset's JSON");
  show->add_option("name", preset_name)->required();

  CLI::App* validate = app.add_subcommand("validate", "check a configuration without running it");
  validate->add_option("config", source, "preset name or JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const Preset& p : presets()) fmt::print("{:<18} {}\n", p.name, p.description);
      return ok;
    }
    if (*show) {
      const auto p = find_preset(preset_name);
      if (!p) {
        fmt::print(stderr, "unknown preset '{}'\n", preset_name);
        return config_error;
      }
      fmt::print("{}\n", p->json);
      return ok;
    }
    if (*validate) {
      const ExperimentConfig c = load_config(source);
      fmt::print("{}: valid ({} mode, {} probes up to t = {})\n", c.name, to_string(c.mode),
                 c.probes.size(), c.t_end);
      return ok;
    }
    if (*run) return execute(source, Action::run, out);
    if (*sweep) return execute(source, Action::sweep, out);
    if (*compare) return execute(source, Action::compare, out);
  } catch (const ConfigError& e) {
    print_issues(e);
    return config_error;
  } catch (const IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return io_error;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return config_error;
  } catch (const std::exception& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return solver_abort;
  }
  return ok;
}
