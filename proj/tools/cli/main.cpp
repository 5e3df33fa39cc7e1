#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace gearshift::cli;

namespace {

struct Common {
  std::string config;
  std::string scenario;
  std::string model = "dct-friction";
  std::string out;
  bool machine_readable = false;
  bool echo_config = false;
};

void add_common(CLI::App* cmd, Common& c, bool shift_options) {
  cmd->add_option("--config", c.config, "Vehicle and scenario config (JSON)")->required()->check(CLI::ExistingFile);
  if (shift_options) {
    cmd->add_option("--scenario", c.scenario, "Scenario name from the config")->required();
    cmd->add_option("--model", c.model, "dct-friction | dct-owc | dbt-simple | dbt-full")->capture_default_str();
  }
  cmd->add_option("--out", c.out, "Output file; '-' or absent writes to stdout");
  cmd->add_flag("--machine-readable", c.machine_readable, "JSON report instead of text");
  cmd->add_flag("--echo-config", c.echo_config, "Print effective config values to stderr");
}

ConfigDocument load(const Common& c) {
  ConfigDocument doc = load_config(c.config);
  if (c.echo_config) std::cerr << describe(doc);
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gearshift feasibility toolkit for two-speed electric powertrains"};
  app.require_subcommand(1);

  Common sim_opts, check_opts, size_opts, sweep_opts;
  std::optional<double> delta_m;
  SweepSpec sweep;

  auto* sim = app.add_subcommand("simulate", "Simulate a no-jerk shift and write the trajectory CSV");
  add_common(sim, sim_opts, true);
  sim->add_option("--delta-m", delta_m, "Speed-raise target for dual-friction upshifts, rad/s");

  auto* check = app.add_subcommand("check", "Run the pre-shift feasibility check");
  add_common(check, check_opts, true);

  auto* size = app.add_subcommand("size-motor", "Check motor ratings against the design specs");
  add_common(size, size_opts, false);

  auto* sw = app.add_subcommand("sweep", "Sweep one config parameter and tabulate feasibility");
  add_common(sw, sweep_opts, true);
  sw->add_option("--param", sweep.param, "Dotted config path, 'scenario.<field>' or 'delta_m'")->required();
  sw->add_option("--from", sweep.from, "First value")->required();
  sw->add_option("--to", sweep.to, "Last value")->required();
  sw->add_option("--steps", sweep.steps, "Number of points, at least 2")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*sim) {
      const auto cfg = load(sim_opts);
      return cmd_simulate(cfg, sim_opts.scenario, require_model(sim_opts.model), sim_opts.out,
                          sim_opts.machine_readable, std::cout, std::cerr, delta_m);
    }
    if (*check) {
      const auto cfg = load(check_opts);
      return cmd_check(cfg, check_opts.scenario, require_model(check_opts.model), check_opts.machine_readable,
                       std::cout);
    }
    if (*size) {
      const auto cfg = load(size_opts);
      return cmd_size_motor(cfg, size_opts.out, size_opts.machine_readable, std::cout);
    }
    if (*sw) {
      if (sweep_opts.echo_config) load(sweep_opts);
      sweep.scenario = sweep_opts.scenario;
      sweep.model = require_model(sweep_opts.model);
      return cmd_sweep(read_config_json(sweep_opts.config), sweep, sweep_opts.out, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
