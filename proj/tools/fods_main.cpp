// Command-line front end: scenario subcommands over the experiments runner.
#include "fods/coefficients.hpp"
#include "fods/experiments/config.hpp"
#include "fods/experiments/runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace {

using namespace fods;
using namespace fods::experiments;

struct CommonOptions {
  std::string config;
  std::string preset;
  std::string out;
  bool svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
};

void add_common_options(CLI::App* sub, CommonOptions& opt) {
  sub->add_option("--config", opt.config, "experiment config file (JSON)");
  sub->add_option("--preset", opt.preset, "model preset: eeg or scalar");
  sub->add_option("--out", opt.out, "output directory for artifacts");
  sub->add_flag("--svg", opt.svg, "also render an SVG plot");
  sub->add_option("--seed", opt.seed, "random seed");
  sub->add_option("--horizon", opt.horizon, "number of simulation steps K");
}

// Merges the config file (if any) with command-line overrides and pins the
// scenario to the invoked subcommand.
ExperimentSpec build_spec(const CommonOptions& opt, Scenario scenario) {
  ExperimentSpec spec;
  if (!opt.config.empty()) {
    spec = load_config(opt.config);
    if (spec.scenario_explicit && spec.scenario != scenario)
      throw ConfigError("config names scenario \"" + scenario_name(spec.scenario) +
                        "\" but the " + scenario_name(scenario) + " subcommand was invoked");
  } else if (opt.preset.empty()) {
    throw ConfigError("need --config or --preset");
  }
  spec.scenario = scenario;
  spec.scenario_explicit = true;
  if (!opt.preset.empty()) spec.model = ModelSpec{/*preset=*/opt.preset, {}, {}, {}, {}};
  if (!opt.out.empty()) spec.output.directory = opt.out;
  if (opt.svg) spec.output.svg = true;
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.horizon) spec.horizon = *opt.horizon;
  spec.validate();
  return spec;
}

void print_artifacts(const std::vector<std::string>& paths) {
  for (const auto& p : paths) std::cout << p << "\n";
}

int run_scenario(const CommonOptions& opt, Scenario scenario) {
  print_artifacts(run_experiment(build_spec(opt, scenario)));
  return 0;
}

int run_coeffs(const CommonOptions& opt) {
  ExperimentSpec spec;
  if (!opt.config.empty()) {
    spec = load_config(opt.config);
  } else if (opt.preset.empty()) {
    throw ConfigError("need --config or --preset");
  }
  if (!opt.preset.empty()) spec.model = ModelSpec{/*preset=*/opt.preset, {}, {}, {}, {}};
  if (!opt.out.empty()) spec.output.directory = opt.out;
  if (opt.horizon) spec.horizon = *opt.horizon;
  if (spec.horizon < 1)
    throw ConfigError("horizon must be at least 1, got " + std::to_string(spec.horizon));

  const SystemModel<double> model = spec.model.resolve();
  const auto table = build_coefficient_table(model, spec.horizon);
  std::filesystem::create_directories(spec.output.directory);
  const auto path = (std::filesystem::path(spec.output.directory) / "coefficients.csv").string();
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write_coefficient_csv(file, table);
  if (!file.flush()) throw IoError("write failed for " + path);
  print_artifacts({path});
  return 0;
}

int run_sweep(const std::vector<std::string>& config_paths) {
  std::vector<ExperimentSpec> specs;
  specs.reserve(config_paths.size());
  std::set<std::string> dirs;
  for (const auto& path : config_paths) {
    specs.push_back(load_config(path));
    const auto canon = std::filesystem::weakly_canonical(specs.back().output.directory).string();
    if (!dirs.insert(canon).second)
      throw ConfigError("sweep output directories collide: " + specs.back().output.directory);
  }
  std::vector<std::future<std::vector<std::string>>> futures;
  futures.reserve(specs.size());
  for (const auto& spec : specs)
    futures.push_back(std::async(std::launch::async, [&spec] { return run_experiment(spec); }));
  for (auto& f : futures) print_artifacts(f.get());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional-order dynamical systems toolkit"};
  app.require_subcommand(1);

  CommonOptions coeffs_opt, sim_opt, obs_opt, cl_opt, mpc_opt, sep_opt;
  add_common_options(app.add_subcommand("coeffs", "write the memory coefficient table as CSV"),
                     coeffs_opt);
  add_common_options(app.add_subcommand("simulate", "open-loop trajectory"), sim_opt);
  add_common_options(app.add_subcommand("observe", "plant plus state estimator"), obs_opt);
  add_common_options(app.add_subcommand("closedloop", "estimated-state feedback loop"), cl_opt);
  add_common_options(app.add_subcommand("mpc", "receding-horizon tracking loop"), mpc_opt);
  add_common_options(
      app.add_subcommand("verify-separation", "spectral check of the truncated loop operator"),
      sep_opt);

  std::vector<std::string> sweep_configs;
  app.add_subcommand("sweep", "run several configs concurrently")
      ->add_option("--config", sweep_configs, "config files, one per run")
      ->required()
      ->expected(-1);

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("coeffs")) return run_coeffs(coeffs_opt);
    if (app.got_subcommand("simulate")) return run_scenario(sim_opt, Scenario::Simulate);
    if (app.got_subcommand("observe")) return run_scenario(obs_opt, Scenario::Observe);
    if (app.got_subcommand("closedloop")) return run_scenario(cl_opt, Scenario::ClosedLoop);
    if (app.got_subcommand("mpc")) return run_scenario(mpc_opt, Scenario::Mpc);
    if (app.got_subcommand("verify-separation"))
      return run_scenario(sep_opt, Scenario::VerifySeparation);
    if (app.got_subcommand("sweep")) return run_sweep(sweep_configs);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DesignError& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
