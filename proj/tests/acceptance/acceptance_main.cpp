// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Heavier than the unit tests; end-to-end criteria run real
// 50-seed experiment batches.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "beamtrack/harness.hpp"
#include "../oracles.hpp"

using namespace beamtrack;
namespace fs = std::filesystem;

namespace {

constexpr int kWorkers = 4;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

struct Criterion {
  int id;
  const char* name;
  bool pass = false;
  std::string detail;
};

void run_parallel(int n_tasks, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_tasks) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(kWorkers, n_tasks); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x2545F4914F6CDD1Dull;
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  return z ^ (z >> 31);
}

Posterior random_posterior(int nb, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Posterior post;
  post.mean.resize(nb);
  for (int i = 0; i < nb; ++i) post.mean(i) = 3.0 * normal(rng);
  Matrix a(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) a(i, j) = normal(rng);
  post.cross_cov = 2.0 * (a * a.transpose()) / double(nb);
  post.cross_cov.diagonal().array() += 1e-6;
  post.std = post.cross_cov.diagonal().cwiseSqrt();
  return post;
}

// Per-sample improvement max over the set (the quantity J averages).
double sample_improvement(const AcquisitionContext& ctx, int sample,
                          const std::vector<int>& set) {
  double best = -1e300;
  for (int b : set) best = std::max(best, ctx.samples()(sample, b));
  return std::max(best - ctx.f_star(), 0.0);
}

double j_std_error(const AcquisitionContext& ctx, const std::vector<int>& set) {
  const int s = ctx.num_samples();
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < s; ++i) {
    const double imp = sample_improvement(ctx, i, set);
    sum += imp;
    sum_sq += imp * imp;
  }
  const double mean = sum / s;
  return std::sqrt(std::max(0.0, sum_sq / s - mean * mean) / s);
}

// ---------------------------------------------------------------------------
// Criteria 1-7: component-level, against the independent oracles.
// ---------------------------------------------------------------------------

Criterion criterion_1() {
  Criterion c{1, "GP posterior matches the dense explicit-inverse oracle"};
  const double t0 = now_seconds();
  const BeamGrid grid(ArrayGeometry{4, 4, 0.5, 0.5},
                      AngleGrid::from_degrees(-56.25, 7.5, 16, {0, 7.5, 15, 22.5}));
  Rng rng(101);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> n_obs(1, 50);
  std::uniform_int_distribution<int> beam(0, 63);
  std::normal_distribution<double> value(0.0, 5.0);

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    GpModel model;
    model.time_params = {0.5 + 49.5 * u01(rng), 2.0 + 98.0 * u01(rng)};
    model.beam_params.metric = {0.5 + 9.5 * u01(rng), 0.5 + 9.5 * u01(rng)};
    model.noise_std = 0.1 + 1.9 * u01(rng);
    const int n = n_obs(rng);
    for (int i = 0; i < n; ++i) {
      model.buffer.push_back({i * 30 / n, beam(rng), value(rng)});
    }
    const std::int64_t t = 31;
    const Posterior fast = posterior_at_slot(model, grid, t);
    const Posterior slow = oracle::dense_posterior(model, grid, t);
    worst = std::max(worst, (fast.mean - slow.mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, (fast.std - slow.std).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (fast.cross_cov - slow.cross_cov).cwiseAbs().maxCoeff());
  }
  const double dt = now_seconds() - t0;
  c.pass = worst < 1e-8 && dt < 30.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max abs err %.2e over 100 instances, %.1fs",
                worst, dt);
  c.detail = buf;
  return c;
}

Criterion criterion_2() {
  Criterion c{2, "closed-form EI vs 1e6-sample MC on 50 random triples"};
  Rng rng(202);
  std::uniform_real_distribution<double> mu(-4.0, 4.0);
  std::uniform_real_distribution<double> sigma(0.05, 3.0);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double m = mu(rng), s = sigma(rng), f = mu(rng);
    const auto mc = oracle::mc_ei_single(m, s, f, 1000000, mix(0xE1, trial));
    // deep-tail cases can leave every MC sample at zero improvement (SE 0)
    const double excess =
        std::abs(ei_single(m, s, f) - mc.mean) - 3.0 * mc.std_error;
    worst = std::max(worst, excess);
    if (excess > 1e-5) ++failures;
  }
  c.pass = failures == 0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst excess over 3 SE = %.2e, %d/50 out",
                worst, failures);
  c.detail = buf;
  return c;
}

Criterion criterion_3() {
  Criterion c{3, "set-EI consistency: singletons vs closed form, pairs vs MC"};
  Rng rng(303);
  int failures = 0;
  double worst = 0.0;

  for (int trial = 0; trial < 10; ++trial) {
    const Posterior post = random_posterior(8, rng);
    AcquisitionContext ctx(post, 100000, mix(0xE3, trial));
    std::uniform_int_distribution<int> pick(0, 7);
    const int b = pick(rng);
    const double excess = std::abs(j_estimate(ctx, {b}) - ctx.ei_single_beam(b)) -
                          3.0 * j_std_error(ctx, {b});
    worst = std::max(worst, excess);
    if (excess > 1e-5) ++failures;
  }

  std::vector<double> pair_excess(20);
  run_parallel(20, [&](int trial) {
    Rng local(mix(0xE3B, trial));
    const Posterior post = random_posterior(8, local);
    AcquisitionContext ctx(post, 100000, mix(0xE3C, trial));
    std::uniform_int_distribution<int> pick(0, 7);
    int b1 = pick(local), b2 = pick(local);
    if (b1 == b2) b2 = (b1 + 1) % 8;
    const auto mc = oracle::mc_ei_pair(
        post.mean(b1), post.mean(b2), post.cross_cov(b1, b1),
        post.cross_cov(b2, b2), post.cross_cov(b1, b2), ctx.f_star(), 10000000,
        mix(0xE3D, trial));
    const double cache_se = j_std_error(ctx, {b1, b2});
    const double se =
        std::sqrt(mc.std_error * mc.std_error + cache_se * cache_se);
    pair_excess[trial] =
        std::abs(j_estimate(ctx, {b1, b2}) - mc.mean) - 3.0 * se;
  });
  for (double excess : pair_excess) {
    worst = std::max(worst, excess);
    if (excess > 1e-5) ++failures;
  }
  c.pass = failures == 0;
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "worst excess over 3 SE = %.2e across 10+20 cases", worst);
  c.detail = buf;
  return c;
}

Criterion criterion_4() {
  Criterion c{4, "pathwise monotonicity and submodularity on 1000 triples"};
  Rng rng(404);
  int checked = 0, violations = 0;
  for (int block = 0; block < 20; ++block) {
    const Posterior post = random_posterior(12, rng);
    AcquisitionContext ctx(post, 512, mix(0xE4, block));
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> perm(12);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::uniform_int_distribution<int> big_size(2, 10);
      const int big = big_size(rng);
      std::uniform_int_distribution<int> small_size(1, big - 1);
      const int sml = small_size(rng);
      std::vector<int> b_small(perm.begin(), perm.begin() + sml);
      std::vector<int> b_big(perm.begin(), perm.begin() + big);
      const int extra = perm[11];
      std::vector<int> b_small_x = b_small, b_big_x = b_big;
      b_small_x.push_back(extra);
      b_big_x.push_back(extra);

      ++checked;
      bool bad = false;
      for (int s = 0; s < ctx.num_samples(); ++s) {
        const double i_small = sample_improvement(ctx, s, b_small);
        const double i_big = sample_improvement(ctx, s, b_big);
        if (i_big < i_small) bad = true;  // monotonicity, per sample
        const double g_small = sample_improvement(ctx, s, b_small_x) - i_small;
        const double g_big = sample_improvement(ctx, s, b_big_x) - i_big;
        if (g_small < g_big - 1e-12) bad = true;  // submodularity, per sample
        if (bad) break;
      }
      if (bad) ++violations;
    }
  }
  c.pass = violations == 0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d violations in %d triples x 512 samples",
                violations, checked);
  c.detail = buf;
  return c;
}

Criterion criterion_5() {
  Criterion c{5, "greedy (1-1/e) bound vs exhaustive C(10,3) enumeration"};
  const double t0 = now_seconds();
  std::vector<double> worst_gap(100, 0.0);
  std::atomic<int> violations{0};
  run_parallel(100, [&](int trial) {
    Rng rng(mix(0xE5, trial));
    const Posterior post = random_posterior(10, rng);
    AcquisitionContext ctx(post, 2048, mix(0xE5B, trial));
    const BeamsetChoice greedy = greedy_fixed_size(ctx, 3);

    double j_star = -1.0, j_min = 1e300;
    for (int a = 0; a < 10; ++a) {
      j_min = std::min(j_min, j_estimate(ctx, {a}));
      for (int b = a + 1; b < 10; ++b) {
        for (int d = b + 1; d < 10; ++d) {
          j_star = std::max(j_star, j_estimate(ctx, {a, b, d}));
        }
      }
    }
    if (j_star - j_min <= 1e-12) return;  // degenerate: any set is optimal
    const double gap = (j_star - greedy.j_values.back()) / (j_star - j_min);
    worst_gap[trial] = gap;
    if (gap > std::exp(-1.0) + 1e-9) violations.fetch_add(1);
  });
  const double dt = now_seconds() - t0;
  const double worst = *std::max_element(worst_gap.begin(), worst_gap.end());
  c.pass = violations.load() == 0 && dt < 120.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst gap %.4f (bound %.4f), %.1fs", worst,
                std::exp(-1.0), dt);
  c.detail = buf;
  return c;
}

Criterion criterion_6() {
  Criterion c{6, "greedy prefix increments are nonincreasing"};
  Rng rng(606);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Posterior post = random_posterior(16, rng);
    AcquisitionContext ctx(post, 2048, mix(0xE6, trial));
    const BeamsetChoice choice = greedy_fixed_size(ctx, 8);
    double prev = choice.j_values[0];
    for (std::size_t i = 1; i < choice.j_values.size(); ++i) {
      const double inc = choice.j_values[i] - choice.j_values[i - 1];
      // Shared samples make this exact; the 3-SE allowance is pure slack.
      const double allowance =
          3.0 * j_std_error(ctx, std::vector<int>(choice.beams.begin(),
                                                  choice.beams.begin() + i + 1));
      if (inc > prev + allowance) {
        ++violations;
        worst = std::max(worst, inc - prev);
      }
      prev = inc;
    }
  }
  c.pass = violations == 0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d violations over 100 posteriors to n=8",
                violations);
  c.detail = buf;
  return c;
}

Criterion criterion_7() {
  Criterion c{7, "choose_beamset: nonempty greedy prefix, singleton at huge h"};
  Rng rng(707);
  std::uniform_real_distribution<double> coeff(0.0, 0.6);
  int failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Posterior post = random_posterior(12, rng);
    AcquisitionContext ctx(post, 512, mix(0xE7, trial));
    const OverheadPenalty penalty{coeff(rng), 0.05 * coeff(rng), 10};
    const BeamsetChoice chosen = choose_beamset(ctx, penalty);
    if (chosen.beams.empty()) {
      ++failures;
      continue;
    }
    const BeamsetChoice greedy = greedy_fixed_size(ctx, 10);
    if (chosen.beams.size() > greedy.beams.size()) {
      ++failures;
      continue;
    }
    for (std::size_t i = 0; i < chosen.beams.size(); ++i) {
      if (chosen.beams[i] != greedy.beams[i]) {
        ++failures;
        break;
      }
    }
    if (choose_beamset(ctx, {1e9, 0.0, 10}).beams.size() != 1) ++failures;
  }
  c.pass = failures == 0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d failures over 500 contexts", failures);
  c.detail = buf;
  return c;
}

// ---------------------------------------------------------------------------
// Criteria 8-11: end-to-end tracking batches.
// ---------------------------------------------------------------------------

const ArrayGeometry kGeom{16, 16, 0.5, 0.5};

BeamGrid full_grid() {
  return BeamGrid(kGeom,
                  AngleGrid::from_degrees(-56.25, 7.5, 16, {0, 7.5, 15, 22.5}));
}

ScenarioParams speed_class(double max_rate_deg) {
  ScenarioParams p;
  p.max_azimuth_rate_deg = max_rate_deg;
  return p;
}

TrackerPolicy low_overhead_bo() {
  TrackerPolicy policy;
  policy.kind = PolicyKind::bayes_opt;
  policy.variant = "low_overhead";
  policy.bayes.penalty = {0.2, 0.0, 16};
  policy.bayes.mc_samples = 2048;
  policy.bayes.initial_model.time_params = {16.0, 20.0};
  policy.bayes.initial_model.noise_std = 1.0;
  // trimmed fit budget keeps the 50-seed batch inside the runtime budget
  policy.bayes.fit.restarts = 2;
  policy.bayes.fit.max_evals = 100;
  policy.bayes.fit.fit_subset = 96;
  policy.bayes.refit_period = 10;
  return policy;
}

struct Batch {
  std::vector<EpisodeMetrics> episodes;  // indexed by seed
  double mean_accuracy = 0.0;
  double mean_overhead = 0.0;
};

// Paired batches: the scenario for (speed, seed) is shared by every policy.
Batch run_batch(const TrackerPolicy& policy, const ScenarioParams& params,
                int speed_tag, int seeds, int horizon) {
  const BeamGrid grid = full_grid();
  Batch batch;
  batch.episodes.resize(seeds);
  run_parallel(seeds, [&](int seed) {
    Rng scenario_rng(mix(0xA11CE5 + speed_tag, seed));
    const ChannelScenario scenario =
        random_scenario(params, kGeom, scenario_rng);
    Rng episode_rng(mix(std::hash<std::string>{}(policy.label()), seed));
    batch.episodes[seed] =
        run_episode(policy, scenario, grid, horizon, episode_rng).metrics;
  });
  for (const auto& m : batch.episodes) {
    batch.mean_accuracy += m.accuracy;
    batch.mean_overhead += m.overhead;
  }
  batch.mean_accuracy /= seeds;
  batch.mean_overhead /= seeds;
  return batch;
}

// One-sided sign-test p-value: P(Binomial(n, 1/2) >= wins).
double sign_test_p(int wins, int n) {
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0) - n * std::numbers::ln2);
  }
  return p;
}

struct EndToEnd {
  Criterion c8{8, "end-to-end: BO beats random at matched overhead, near spline"};
  Criterion c9{9, "speed degradation: fast-class accuracy <= slow-class"};
  Criterion c10{10, "baseline sanity: oracle exact, overhead = phi, phi ordering"};
  Criterion c11{11, "cold-start transient: late overhead below early overhead"};
};

EndToEnd end_to_end() {
  EndToEnd out;
  const double t0 = now_seconds();
  const int kSeeds = 50, kHorizon = 500;
  const ScenarioParams slow = speed_class(0.25);
  const ScenarioParams fast = speed_class(0.75);
  const TrackerPolicy bo = low_overhead_bo();

  TrackerPolicy spline50;
  spline50.kind = PolicyKind::spline;
  spline50.variant = "phi=0.5";
  spline50.subsample.phi = 0.5;
  TrackerPolicy spline25 = spline50;
  spline25.variant = "phi=0.25";
  spline25.subsample.phi = 0.25;

  const Batch bo_slow = run_batch(bo, slow, 0, kSeeds, kHorizon);
  const Batch sp50 = run_batch(spline50, slow, 0, kSeeds, kHorizon);
  const Batch sp25 = run_batch(spline25, slow, 0, kSeeds, kHorizon);

  TrackerPolicy random_matched;
  random_matched.kind = PolicyKind::random_subset;
  random_matched.variant = "matched";
  random_matched.subsample.phi = bo_slow.mean_overhead;
  const Batch rnd = run_batch(random_matched, slow, 0, kSeeds, kHorizon);

  // 8a overhead cap; 8b paired sign test vs random; 8c near spline phi=0.5.
  int wins = 0, decided = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const double d =
        bo_slow.episodes[s].accuracy - rnd.episodes[s].accuracy;
    if (d != 0.0) {
      ++decided;
      if (d > 0.0) ++wins;
    }
  }
  const double p = decided > 0 ? sign_test_p(wins, decided) : 1.0;
  const bool a = bo_slow.mean_overhead <= 0.20;
  const bool b = bo_slow.mean_accuracy > rnd.mean_accuracy && p < 0.01;
  const bool cc = bo_slow.mean_accuracy >= sp50.mean_accuracy - 0.10 &&
                  bo_slow.mean_overhead < 0.5 * sp50.mean_overhead;
  const double dt = now_seconds() - t0;
  out.c8.pass = a && b && cc && dt < 600.0;
  {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "BO acc %.3f ovh %.3f | random acc %.3f (p=%.2e, %d/%d) | "
                  "spline0.5 acc %.3f ovh %.3f | %.0fs",
                  bo_slow.mean_accuracy, bo_slow.mean_overhead,
                  rnd.mean_accuracy, p, wins, decided, sp50.mean_accuracy,
                  sp50.mean_overhead, dt);
    out.c8.detail = buf;
  }

  // 9: fast class over a shared 20-seed prefix.
  const int kFastSeeds = 20;
  const Batch bo_fast = run_batch(bo, fast, 1, kFastSeeds, kHorizon);
  double slow_shared = 0.0;
  for (int s = 0; s < kFastSeeds; ++s) slow_shared += bo_slow.episodes[s].accuracy;
  slow_shared /= kFastSeeds;
  out.c9.pass = bo_fast.mean_accuracy <= slow_shared;
  {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "fast acc %.3f vs slow acc %.3f (20 seeds)",
                  bo_fast.mean_accuracy, slow_shared);
    out.c9.detail = buf;
  }

  // 10: oracle noiseless exactness + overhead identities + phi ordering.
  {
    const BeamGrid grid = full_grid();
    ScenarioParams clean = slow;
    clean.noise_std_db = 0.0;
    TrackerPolicy oracle;
    oracle.kind = PolicyKind::oracle_full_sweep;
    bool oracle_ok = true;
    for (int seed = 0; seed < 5; ++seed) {
      Rng scenario_rng(mix(0xC1EA, seed));
      const ChannelScenario scenario =
          random_scenario(clean, kGeom, scenario_rng);
      Rng rng(mix(0xC1EB, seed));
      const EpisodeMetrics m =
          run_episode(oracle, scenario, grid, 100, rng).metrics;
      if (m.accuracy != 1.0 || m.rsrp_error_db != 0.0 || m.overhead != 1.0) {
        oracle_ok = false;
      }
    }
    bool overhead_ok = true;
    for (const auto& m : sp50.episodes) {
      if (m.overhead != 0.5) overhead_ok = false;
    }
    for (const auto& m : sp25.episodes) {
      if (m.overhead != 0.25) overhead_ok = false;
    }
    TrackerPolicy gpr25;
    gpr25.kind = PolicyKind::spatial_gpr;
    gpr25.subsample.phi = 0.25;
    const Batch gpr = run_batch(gpr25, slow, 0, 5, 60);
    for (const auto& m : gpr.episodes) {
      if (m.overhead != 0.25) overhead_ok = false;
    }
    const bool ordering = sp50.mean_accuracy >= sp25.mean_accuracy;
    out.c10.pass = oracle_ok && overhead_ok && ordering;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "oracle %s, overhead identities %s, spline acc 0.5=%.3f >= "
                  "0.25=%.3f: %s",
                  oracle_ok ? "exact" : "BROKEN",
                  overhead_ok ? "exact" : "BROKEN", sp50.mean_accuracy,
                  sp25.mean_accuracy, ordering ? "yes" : "no");
    out.c10.detail = buf;
  }

  // 11: settling of the BO overhead time series, averaged over seeds.
  {
    double early = 0.0, late = 0.0;
    long early_n = 0, late_n = 0;
    for (const auto& m : bo_slow.episodes) {
      for (const auto& rec : m.per_slot) {
        const double ovh = double(rec.proposed.size()) / 64.0;
        if (rec.slot < 20) {
          early += ovh;
          ++early_n;
        } else if (rec.slot >= 100) {
          late += ovh;
          ++late_n;
        }
      }
    }
    early /= early_n;
    late /= late_n;
    out.c11.pass = late < early;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "overhead slots[0,20) %.3f vs [100,500) %.3f",
                  early, late);
    out.c11.detail = buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 12: determinism + verify at the artifact level.
// ---------------------------------------------------------------------------

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Criterion criterion_12() {
  Criterion c{12, "verify subcommand + byte-identical reruns"};
  const char* config_text = R"({
    "grid": { "m_h": 4, "m_v": 2, "azimuth_start_deg": -30.0,
              "azimuth_step_deg": 7.5, "azimuth_count": 8,
              "elevations_deg": [0.0, 7.5] },
    "speed_classes": { "slow": { "num_paths": 2, "max_azimuth_rate_deg": 0.25 } },
    "policies": [
      { "kind": "oracle_full_sweep" },
      { "kind": "bayes_opt", "variant": "smoke",
        "penalty": { "c1": 0.2, "n_max": 8 }, "mc_samples": 256,
        "gp": { "fit_restarts": 1, "fit_max_evals": 40 } }
    ],
    "horizon": 40, "seeds": [1, 2], "warmup": 0, "warmup_alt": 10
  })";
  const fs::path base = fs::temp_directory_path() / "beamtrack_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "config.json";
  {
    std::ofstream out(cfg);
    out << config_text;
  }
  const ExperimentConfig config = load_config(cfg);
  const fs::path run_a = base / "run_a";
  const fs::path run_b = base / "run_b";
  const ResultsTable table_a = run_experiments(config, run_a, {4, 0});
  run_experiments(config, run_b, {2, 0});

  bool ok = table_a.failures.empty();
  std::vector<std::string> errors;
  if (!verify_run(run_a, &errors)) ok = false;
  if (slurp(run_a / "results.csv") != slurp(run_b / "results.csv")) ok = false;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(run_a / "slots")) {
    ++files;
    if (slurp(entry.path()) !=
        slurp(run_b / "slots" / entry.path().filename())) {
      ok = false;
    }
  }
  c.pass = ok && files == 4;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "verify %s, %d slot files compared",
                errors.empty() ? "clean" : errors.front().c_str(), files);
  c.detail = buf;
  return c;
}

void report(const Criterion& c, int& failures) {
  std::printf("[%2d] %s  %s (%s)\n", c.id, c.pass ? "PASS" : "FAIL", c.name,
              c.detail.c_str());
  std::fflush(stdout);
  if (!c.pass) ++failures;
}

}  // namespace

int main() {
  int failures = 0;
  report(criterion_1(), failures);
  report(criterion_2(), failures);
  report(criterion_3(), failures);
  report(criterion_4(), failures);
  report(criterion_5(), failures);
  report(criterion_6(), failures);
  report(criterion_7(), failures);
  const EndToEnd e2e = end_to_end();
  report(e2e.c8, failures);
  report(e2e.c9, failures);
  report(e2e.c10, failures);
  report(e2e.c11, failures);
  report(criterion_12(), failures);
  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
