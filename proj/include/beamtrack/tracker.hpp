#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beamtrack/acquisition.hpp"
#include "beamtrack/channel_sim.hpp"
#include "beamtrack/gp_core.hpp"

namespace beamtrack {

enum class PolicyKind {
  bayes_opt,
  spline,
  spatial_gpr,
  random_subset,
  oracle_full_sweep,
};

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

struct BayesOptConfig {
  OverheadPenalty penalty{};
  int mc_samples = 2048;
  GpModel initial_model{};
  GpFitOptions fit{};
  int refit_every_slot_below = 64;  // refit each slot while buffer is smaller
  int refit_period = 5;             // then refit every this many slots
};

struct SubsampleConfig {
  double phi = 0.5;  // sampled fraction, in (0, 1]
};

struct TrackerPolicy {
  PolicyKind kind = PolicyKind::oracle_full_sweep;
  std::string variant;  // label for reporting ("low_overhead", "phi=0.5", ...)
  BayesOptConfig bayes{};
  SubsampleConfig subsample{};

  std::string label() const {
    return variant.empty() ? to_string(kind) : to_string(kind) + ":" + variant;
  }
};

struct GpHyperSnapshot {
  double theta1 = 0.0, theta2 = 0.0, ell_h = 0.0, ell_v = 0.0, sigma = 0.0;
};

/// Optional per-slot landscape dump for plotting.
struct LandscapeSnapshot {
  std::int64_t slot = 0;
  std::vector<double> ei;              // single-beam EI per beam
  std::vector<double> posterior_mean;  // dB per beam
  std::vector<double> posterior_std;
  std::vector<double> true_rsrp;       // dB per beam
  std::vector<int> proposed;
  int predicted_best = -1;
  int true_best = -1;
};

struct SlotRecord {
  std::int64_t slot = 0;
  std::vector<int> proposed;
  std::vector<Observation> measured;
  int chosen = -1;
  int true_best = -1;
  double chosen_rsrp_db = 0.0;  // ground truth, noiseless
  double best_rsrp_db = 0.0;    // ground truth of the true best beam
  int diag_predicted_best = -1; // surrogate's own argmax (spline/GPR/BO)
  GpHyperSnapshot hypers{};     // bayes_opt only
};

struct EpisodeMetrics {
  double accuracy = 0.0;
  double overhead = 0.0;
  double rsrp_error_db = 0.0;
  std::vector<SlotRecord> per_slot;
};

struct EpisodeOptions {
  int warmup = 0;
  std::vector<std::int64_t> snapshot_slots;  // bayes_opt landscape dumps
};

struct EpisodeResult {
  EpisodeMetrics metrics;
  std::vector<LandscapeSnapshot> snapshots;
};

/// Metrics over records at slots >= warmup: accuracy is the fraction of
/// slots whose chosen beam is the true best, overhead the mean |B_t| /
/// num_beams, rsrp_error the mean ground-truth gap in dB.
EpisodeMetrics compute_metrics(const std::vector<SlotRecord>& records,
                               int warmup, int num_beams);

/// One tracked episode over `horizon` slots (propose / measure / select /
/// update loop for bayes_opt; the baselines propose fixed or random subsets).
/// Deterministic given (policy, scenario, seed, horizon).
EpisodeResult run_episode(const TrackerPolicy& policy,
                          const ChannelScenario& scenario, const BeamGrid& grid,
                          int horizon, Rng& rng,
                          const EpisodeOptions& options = {});

/// The fixed regular sub-grid used by the spline/GPR baselines: all
/// elevation rows, ceil(phi * H) evenly strided azimuth columns.
std::vector<int> subsample_grid(const BeamGrid& grid, double phi);

}  // namespace beamtrack
