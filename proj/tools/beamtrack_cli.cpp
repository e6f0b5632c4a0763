#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamtrack/harness.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"beamtrack: GP-based beam tracking experiments"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a batch of episodes from a config");
  std::string config_path;
  std::string out_dir = "run_out";
  int parallelism = 4;
  std::uint64_t seed_offset = 0;
  run->add_option("config", config_path, "experiment config (JSON, // comments ok)")
      ->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--parallelism", parallelism, "worker thread count");
  run->add_option("--seed-offset", seed_offset, "offset added to every seed");

  // plot-convergence
  auto* plot_conv =
      app.add_subcommand("plot-convergence", "accuracy/overhead/error curves");
  std::string conv_dir;
  std::string conv_policy = "bayes_opt:low_overhead";
  int rolling_window = 20;
  plot_conv->add_option("run-dir", conv_dir, "directory written by `run`")
      ->required();
  plot_conv->add_option("--policy", conv_policy, "policy label to plot");
  plot_conv->add_option("--window", rolling_window, "rolling-mean window, slots");

  // plot-landscape
  auto* plot_land =
      app.add_subcommand("plot-landscape", "EI / posterior / truth heatmaps");
  std::string land_dir;
  std::vector<std::int64_t> slots;
  plot_land->add_option("run-dir", land_dir, "directory written by `run`")
      ->required();
  plot_land->add_option("--slots", slots, "slots to render")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "recompute aggregates from per-slot CSVs");
  std::string verify_dir;
  verify->add_option("run-dir", verify_dir, "directory written by `run`")
      ->required();

  // print-config
  auto* print_config =
      app.add_subcommand("print-config", "print the annotated default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      beamtrack::ExperimentConfig config;
      try {
        config = beamtrack::load_config(config_path);
      } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
      beamtrack::RunOptions options;
      options.parallelism = parallelism;
      options.seed_offset = seed_offset;
      const auto table = beamtrack::run_experiments(config, out_dir, options);
      for (const auto& cell : table.cells) {
        std::printf("%-28s %-8s acc=%.3f ovh=%.3f err=%.3f dB (%d seeds)\n",
                    cell.policy.c_str(), cell.speed.c_str(), cell.accuracy_mean,
                    cell.overhead_mean, cell.rsrp_error_mean, cell.seed_count);
      }
      if (!table.failures.empty()) {
        for (const auto& f : table.failures) std::cerr << "failed: " << f << "\n";
        return 1;
      }
      return 0;
    }
    if (*plot_conv) {
      const auto file = beamtrack::emit_convergence_plot(conv_dir, conv_policy,
                                                         rolling_window);
      std::cout << "wrote " << file.string() << "\n";
      return 0;
    }
    if (*plot_land) {
      for (const auto& file : beamtrack::emit_landscape_plots(land_dir, slots)) {
        std::cout << "wrote " << file.string() << "\n";
      }
      return 0;
    }
    if (*verify) {
      std::vector<std::string> errors;
      if (beamtrack::verify_run(verify_dir, &errors)) {
        std::cout << "verify: OK\n";
        return 0;
      }
      for (const auto& e : errors) std::cerr << "verify: " << e << "\n";
      return 1;
    }
    if (*print_config) {
      std::cout << beamtrack::default_config_json() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
