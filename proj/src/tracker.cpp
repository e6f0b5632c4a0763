#include "beamtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "beamtrack/spline.hpp"

namespace beamtrack {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::bayes_opt: return "bayes_opt";
    case PolicyKind::spline: return "spline";
    case PolicyKind::spatial_gpr: return "spatial_gpr";
    case PolicyKind::random_subset: return "random_subset";
    case PolicyKind::oracle_full_sweep: return "oracle_full_sweep";
  }
  throw std::logic_error("to_string: bad PolicyKind");
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "bayes_opt") return PolicyKind::bayes_opt;
  if (name == "spline") return PolicyKind::spline;
  if (name == "spatial_gpr") return PolicyKind::spatial_gpr;
  if (name == "random_subset") return PolicyKind::random_subset;
  if (name == "oracle_full_sweep") return PolicyKind::oracle_full_sweep;
  throw std::invalid_argument("unknown policy kind: " + name);
}

std::vector<int> subsample_grid(const BeamGrid& grid, double phi) {
  if (phi <= 0.0 || phi > 1.0) {
    throw std::invalid_argument("subsample_grid: phi must be in (0, 1]");
  }
  const int h_count = grid.num_azimuth();
  const int v_count = grid.num_elevation();
  const int m = std::max(1, static_cast<int>(std::ceil(phi * h_count)));

  std::vector<int> beams;
  beams.reserve(static_cast<std::size_t>(m) * v_count);
  for (int v = 0; v < v_count; ++v) {
    for (int i = 0; i < m; ++i) {
      const int h = i * h_count / m;  // even stride, first column kept
      beams.push_back(grid.flat_index({h, v}));
    }
  }
  return beams;
}

namespace {

int argmax_measured(const std::vector<Observation>& measured) {
  int best = measured.front().beam_index;
  double best_val = measured.front().rsrp_db;
  for (const auto& obs : measured) {
    if (obs.rsrp_db > best_val ||
        (obs.rsrp_db == best_val && obs.beam_index < best)) {
      best_val = obs.rsrp_db;
      best = obs.beam_index;
    }
  }
  return best;
}

// Spline baseline diagnostic: per elevation row, a cubic spline across the
// sampled azimuth columns evaluated on the full row; returns the surface
// argmax.
int spline_surface_argmax(const BeamGrid& grid, const std::vector<int>& subset,
                          const std::vector<Observation>& measured) {
  std::map<int, double> value_of;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    value_of[measured[i].beam_index] = measured[i].rsrp_db;
  }
  int best = -1;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < grid.num_elevation(); ++v) {
    std::vector<double> xs, ys;
    for (int h = 0; h < grid.num_azimuth(); ++h) {
      auto it = value_of.find(grid.flat_index({h, v}));
      if (it != value_of.end()) {
        xs.push_back(double(h));
        ys.push_back(it->second);
      }
    }
    if (xs.empty()) continue;
    const CubicSpline1D spline(xs, ys);
    for (int h = 0; h < grid.num_azimuth(); ++h) {
      const double val = spline(double(h));
      if (val > best_val) {
        best_val = val;
        best = grid.flat_index({h, v});
      }
    }
  }
  return best;
}

// Spatial-GPR baseline diagnostic: a beam-kernel-only GP on the current
// slot's measurements, predicted over the full grid.
int gpr_surface_argmax(const BeamGrid& grid,
                       const std::vector<Observation>& measured,
                       double noise_std_db) {
  GpModel model;
  model.time_params = {1.0, 1.0};  // single slot: time factor is constant
  model.beam_params.nu = 1.5;
  model.beam_params.metric = grid.default_metric();
  model.noise_std = std::max(noise_std_db, 1e-3);
  model.window = static_cast<int>(measured.size());
  // Center on the sample mean so the constant prior is not wildly off.
  double mean = 0.0;
  for (const auto& obs : measured) mean += obs.rsrp_db;
  mean /= double(measured.size());
  std::vector<double> prior(grid.num_beams(), mean);
  model.prior_mean = PriorMean{std::move(prior), mean};
  model.buffer = measured;

  const Posterior post = posterior_at_slot(model, grid, measured.front().slot);
  int best = 0;
  post.mean.maxCoeff(&best);
  return best;
}

struct GroundTruth {
  int true_best = 0;
  double best_rsrp_db = 0.0;
  std::vector<double> rsrp_db;  // per beam
};

GroundTruth ground_truth(const ChannelScenario& scenario,
                         const EffectiveChannel& channel, const BeamGrid& grid) {
  GroundTruth gt;
  gt.rsrp_db.resize(grid.num_beams());
  gt.best_rsrp_db = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < grid.num_beams(); ++b) {
    gt.rsrp_db[b] = true_rsrp_db(scenario, channel, grid, b);
    if (gt.rsrp_db[b] > gt.best_rsrp_db) {
      gt.best_rsrp_db = gt.rsrp_db[b];
      gt.true_best = b;
    }
  }
  return gt;
}

std::vector<int> random_subset_beams(const BeamGrid& grid, double phi, Rng& rng) {
  const int size = std::clamp(
      static_cast<int>(std::lround(phi * grid.num_beams())), 1, grid.num_beams());
  std::vector<int> all(grid.num_beams());
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < size; ++i) {
    std::uniform_int_distribution<int> pick(i, grid.num_beams() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

EpisodeMetrics compute_metrics(const std::vector<SlotRecord>& records,
                               int warmup, int num_beams) {
  if (static_cast<int>(records.size()) <= warmup) {
    throw std::invalid_argument("compute_metrics: horizon must exceed warmup");
  }
  EpisodeMetrics metrics;
  metrics.per_slot = records;
  int correct = 0;
  double overhead_sum = 0.0;
  double error_sum = 0.0;
  int counted = 0;
  for (const auto& rec : records) {
    if (rec.slot < warmup) continue;
    ++counted;
    // The DFT codebook contains bit-identical mirror beams (cos is even in
    // azimuth), so correctness is judged on the achieved ground-truth RSRP,
    // not the index alone.
    if (rec.chosen == rec.true_best || rec.chosen_rsrp_db == rec.best_rsrp_db) {
      ++correct;
    }
    overhead_sum += double(rec.proposed.size()) / double(num_beams);
    error_sum += rec.best_rsrp_db - rec.chosen_rsrp_db;
  }
  metrics.accuracy = double(correct) / double(counted);
  metrics.overhead = overhead_sum / double(counted);
  metrics.rsrp_error_db = error_sum / double(counted);
  return metrics;
}

EpisodeResult run_episode(const TrackerPolicy& policy,
                          const ChannelScenario& scenario, const BeamGrid& grid,
                          int horizon, Rng& rng, const EpisodeOptions& options) {
  if (horizon < 1) throw std::invalid_argument("run_episode: horizon < 1");

  EpisodeResult result;
  std::vector<SlotRecord> records;
  records.reserve(horizon);

  GpModel model = policy.bayes.initial_model;
  if (policy.kind == PolicyKind::bayes_opt &&
      model.beam_params.metric.ell_h <= 0.0) {
    model.beam_params.metric = grid.default_metric();
  }
  int slots_since_refit = 0;

  std::vector<int> fixed_subset;
  if (policy.kind == PolicyKind::spline || policy.kind == PolicyKind::spatial_gpr) {
    fixed_subset = subsample_grid(grid, policy.subsample.phi);
  }
  std::vector<int> full_sweep(grid.num_beams());
  std::iota(full_sweep.begin(), full_sweep.end(), 0);

  for (int t = 0; t < horizon; ++t) {
    const EffectiveChannel channel = channel_at(scenario, t);
    const GroundTruth gt = ground_truth(scenario, channel, grid);

    SlotRecord rec;
    rec.slot = t;
    rec.true_best = gt.true_best;
    rec.best_rsrp_db = gt.best_rsrp_db;

    std::optional<Posterior> posterior;
    switch (policy.kind) {
      case PolicyKind::oracle_full_sweep:
        rec.proposed = full_sweep;
        break;
      case PolicyKind::random_subset:
        rec.proposed = random_subset_beams(grid, policy.subsample.phi, rng);
        break;
      case PolicyKind::spline:
      case PolicyKind::spatial_gpr:
        rec.proposed = fixed_subset;
        break;
      case PolicyKind::bayes_opt: {
        posterior = posterior_at_slot(model, grid, t);
        const std::uint64_t slot_seed = rng();
        AcquisitionContext ctx(*posterior, policy.bayes.mc_samples, slot_seed);
        BeamsetChoice choice = choose_beamset(ctx, policy.bayes.penalty);
        std::sort(choice.beams.begin(), choice.beams.end());
        rec.proposed = std::move(choice.beams);

        const bool wanted =
            std::find(options.snapshot_slots.begin(), options.snapshot_slots.end(),
                      t) != options.snapshot_slots.end();
        if (wanted) {
          LandscapeSnapshot snap;
          snap.slot = t;
          snap.true_rsrp = gt.rsrp_db;
          snap.true_best = gt.true_best;
          snap.proposed = rec.proposed;
          snap.ei.resize(grid.num_beams());
          snap.posterior_mean.resize(grid.num_beams());
          snap.posterior_std.resize(grid.num_beams());
          for (int b = 0; b < grid.num_beams(); ++b) {
            snap.ei[b] = ctx.ei_single_beam(b);
            snap.posterior_mean[b] = posterior->mean(b);
            snap.posterior_std[b] = posterior->std(b);
          }
          posterior->mean.maxCoeff(&snap.predicted_best);
          result.snapshots.push_back(std::move(snap));
        }
        break;
      }
    }

    rec.measured = measure(scenario, channel, grid, rec.proposed, rng);
    rec.chosen = argmax_measured(rec.measured);
    rec.chosen_rsrp_db = gt.rsrp_db[rec.chosen];

    switch (policy.kind) {
      case PolicyKind::spline:
        rec.diag_predicted_best =
            spline_surface_argmax(grid, fixed_subset, rec.measured);
        break;
      case PolicyKind::spatial_gpr:
        rec.diag_predicted_best =
            gpr_surface_argmax(grid, rec.measured, scenario.noise_std_db);
        break;
      case PolicyKind::bayes_opt: {
        posterior->mean.maxCoeff(&rec.diag_predicted_best);
        model.add_observations(rec.measured);
        ++slots_since_refit;
        const bool due =
            static_cast<int>(model.buffer.size()) <
                policy.bayes.refit_every_slot_below ||
            slots_since_refit >= policy.bayes.refit_period;
        if (due && static_cast<int>(model.buffer.size()) >=
                       policy.bayes.fit.min_points) {
          model = fit_hyperparameters(model, grid, policy.bayes.fit, rng);
          slots_since_refit = 0;
        }
        rec.hypers = {model.time_params.theta1, model.time_params.theta2,
                      model.beam_params.metric.ell_h,
                      model.beam_params.metric.ell_v, model.noise_std};
        break;
      }
      default:
        break;
    }

    records.push_back(std::move(rec));
  }

  result.metrics = compute_metrics(records, options.warmup, grid.num_beams());
  return result;
}

}  // namespace beamtrack
