#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "beamtrack/tracker.hpp"

namespace beamtrack {

/// A speed class maps to the scenario-distribution parameters used to draw
/// episodes for that class.
struct SpeedClass {
  std::string name;
  ScenarioParams scenario{};
};

struct ExperimentConfig {
  ArrayGeometry geometry{};
  double azimuth_start_deg = -56.25;
  double azimuth_step_deg = 7.5;
  int azimuth_count = 16;
  std::vector<double> elevations_deg{0.0, 7.5, 15.0, 22.5};

  std::vector<SpeedClass> speed_classes;
  std::vector<TrackerPolicy> policies;

  int horizon = 500;
  std::vector<std::uint64_t> seeds;
  int warmup = 0;
  int warmup_alt = 20;        // second aggregate window
  int rolling_window = 20;    // convergence-plot smoothing
  std::vector<std::int64_t> snapshot_slots;  // bayes_opt landscape dumps

  BeamGrid make_grid() const;
  void validate() const;
};

/// Parses the JSON experiment config; throws std::runtime_error with a
/// location-carrying diagnostic on malformed input.
ExperimentConfig load_config(const std::filesystem::path& path);

/// A default config mirroring the shipped example file (useful in tests).
ExperimentConfig default_config();
std::string default_config_json();

struct ResultsCell {
  std::string policy;   // label: kind[:variant]
  std::string speed;
  int seed_count = 0;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double overhead_mean = 0.0, overhead_std = 0.0;
  double rsrp_error_mean = 0.0, rsrp_error_std = 0.0;
  // Same metrics with the warm-up window excluded.
  double accuracy_warm = 0.0, overhead_warm = 0.0, rsrp_error_warm = 0.0;
};

struct ResultsTable {
  std::vector<ResultsCell> cells;
  std::vector<std::string> failures;  // labels of failed episodes, if any
};

struct RunOptions {
  int parallelism = 4;
  std::uint64_t seed_offset = 0;
};

/// Runs every (policy, speed, seed) episode, writes per-slot CSVs, the
/// aggregate results.csv and a manifest, and returns the aggregate table.
/// Fully deterministic for a given config + seed offset.
ResultsTable run_experiments(const ExperimentConfig& config,
                             const std::filesystem::path& out_dir,
                             const RunOptions& options = {});

/// Recomputes per-episode metrics from the per-slot CSVs and checks the
/// aggregate results.csv against them. Returns true when consistent;
/// appends human-readable mismatches to `errors` otherwise.
bool verify_run(const std::filesystem::path& run_dir,
                std::vector<std::string>* errors = nullptr);

/// Rolling accuracy / per-slot overhead / rolling RSRP-error curves, one
/// curve per speed class, written as a three-panel SVG.
/// Returns the written file path.
std::filesystem::path emit_convergence_plot(
    const std::filesystem::path& run_dir, const std::string& policy_label,
    int rolling_window = 20);

/// EI / posterior-mean / true-RSRP heatmap triple for each requested slot of
/// one recorded bayes_opt episode. Returns the written file paths.
std::vector<std::filesystem::path> emit_landscape_plots(
    const std::filesystem::path& run_dir,
    const std::vector<std::int64_t>& slots);

namespace csv {
// Fixed per-slot CSV schema, versioned in the manifest.
inline constexpr const char* kSlotHeader =
    "slot,n_beams,chosen,true_best,chosen_rsrp_db,best_rsrp_db,"
    "theta1,theta2,ell_h,ell_v,sigma";
inline constexpr const char* kResultsHeader =
    "policy,speed,seeds,accuracy_mean,accuracy_std,overhead_mean,overhead_std,"
    "rsrp_error_mean,rsrp_error_std,accuracy_warm,overhead_warm,"
    "rsrp_error_warm";
inline constexpr int kSchemaVersion = 1;

std::string format_double(double v);
}  // namespace csv

}  // namespace beamtrack
