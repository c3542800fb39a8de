#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "d2d/sim/config.hpp"
#include "d2d/sim/experiments.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string experiment;
  std::string out_override;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long trials = 0;
  bool trials_set = false;
  bool plot = false;
  int jobs = 1;
};

int write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  out << content;
  return 0;
}

d2d::sim::SimConfig load_with_overrides(const CliArgs& args, bool apply_experiment) {
  d2d::sim::SimConfig cfg = d2d::sim::load_config(args.config_path);
  if (apply_experiment && !args.experiment.empty())
    d2d::sim::override_experiment_name(cfg, args.experiment);
  if (args.seed_set) cfg.experiment.master_seed = args.seed;
  if (args.trials_set) {
    if (args.trials < 1) throw d2d::sim::ConfigError("--trials must be >= 1");
    cfg.experiment.trials = args.trials;
  }
  if (!args.out_override.empty()) cfg.experiment.out_path = args.out_override;
  return cfg;
}

int run_command(const CliArgs& args) {
  d2d::sim::SimConfig cfg = load_with_overrides(args, true);
  d2d::sim::RunOptions options;
  options.jobs = args.jobs > 0 ? args.jobs
                               : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  options.emit_plot = args.plot;
  const d2d::sim::ExperimentResult result = d2d::sim::run_experiment(cfg, options);
  if (write_file(result.csv_path, result.csv) != 0) return 1;
  std::cout << "wrote " << result.csv_path << "\n";
  if (!result.summary.empty()) std::cout << result.summary;
  if (options.emit_plot && !result.plot_script.empty()) {
    const std::string plot_path = result.csv_path + ".gnuplot";
    if (write_file(plot_path, result.plot_script) != 0) return 1;
    std::cout << "wrote " << plot_path << "\n";
  }
  return 0;
}

int single_command(const CliArgs& args) {
  d2d::sim::SimConfig cfg = load_with_overrides(args, false);
  const d2d::sim::TrialRecord rec = d2d::sim::single_shot(cfg);
  const std::string text = d2d::sim::to_json(rec).dump(2) + "\n";
  std::cout << text;
  if (!args.out_override.empty()) return write_file(args.out_override, text);
  return 0;
}

int validate_command(const CliArgs& args) {
  const d2d::sim::SimConfig cfg = d2d::sim::load_config(args.config_path);
  std::cout << "config ok: experiment " << cfg.experiment.name << ", " << cfg.experiment.trials
            << " trials, seed " << cfg.experiment.master_seed << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Base-station-assisted D2D mode selection, power control and resource allocation"};
  app.require_subcommand(1);
  CliArgs args;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "master seed override")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--out", args.out_override, "output path override");
  };

  CLI::App* run = app.add_subcommand("run", "run a seeded Monte-Carlo experiment");
  run->add_option("experiment", args.experiment,
                  "fig5 | fig6a | fig6b | fig7 | fig8 | single-shot")
      ->required();
  add_common(run);
  run->add_option("--trials", args.trials, "fading realizations per sweep point")
      ->each([&](const std::string&) { args.trials_set = true; });
  run->add_flag("--plot", args.plot, "also write a gnuplot script next to the CSV");
  run->add_option("--jobs", args.jobs, "worker threads (0 = hardware)");

  CLI::App* single = app.add_subcommand("single", "run the decision pipeline once");
  add_common(single);

  CLI::App* validate = app.add_subcommand("validate", "schema-check a config and exit");
  validate->add_option("--config", args.config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return run_command(args);
    if (single->parsed()) return single_command(args);
    if (validate->parsed()) return validate_command(args);
  } catch (const d2d::sim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
