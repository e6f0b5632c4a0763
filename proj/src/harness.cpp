#include "beamtrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace beamtrack {

using nlohmann::json;

namespace csv {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace csv

namespace {

// Stable 64-bit config fingerprint for the manifest (FNV-1a).
std::uint64_t fingerprint(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b * 0xBF58476D1CE4E5B9ull +
                    c * 0x94D049BB133111EBull + 0x2545F4914F6CDD1Dull;
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (c == ':' || c == '=' || c == '/' || c == ' ') c = '_';
  }
  return out;
}

int line_of_byte_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

ScenarioParams parse_scenario(const json& j) {
  ScenarioParams p;
  p.num_paths = j.value("num_paths", p.num_paths);
  p.gain_decay = j.value("gain_decay", p.gain_decay);
  p.max_azimuth_rate_deg = j.value("max_azimuth_rate_deg", p.max_azimuth_rate_deg);
  p.max_elevation_rate_deg =
      j.value("max_elevation_rate_deg", p.max_elevation_rate_deg);
  p.azimuth_span_deg = j.value("azimuth_span_deg", p.azimuth_span_deg);
  p.elevation_min_deg = j.value("elevation_min_deg", p.elevation_min_deg);
  p.elevation_max_deg = j.value("elevation_max_deg", p.elevation_max_deg);
  p.max_phase_rate = j.value("max_phase_rate", p.max_phase_rate);
  p.tx_power = j.value("tx_power", p.tx_power);
  p.noise_std_db = j.value("noise_std_db", p.noise_std_db);
  return p;
}

TrackerPolicy parse_policy(const json& j) {
  TrackerPolicy policy;
  policy.kind = policy_kind_from_string(j.at("kind").get<std::string>());
  policy.variant = j.value("variant", std::string{});

  if (policy.kind == PolicyKind::bayes_opt) {
    auto& b = policy.bayes;
    if (j.contains("penalty")) {
      const json& p = j["penalty"];
      b.penalty.c1 = p.value("c1", b.penalty.c1);
      b.penalty.c2 = p.value("c2", b.penalty.c2);
      b.penalty.n_max = p.value("n_max", b.penalty.n_max);
    }
    b.mc_samples = j.value("mc_samples", b.mc_samples);
    b.refit_every_slot_below =
        j.value("refit_every_slot_below", b.refit_every_slot_below);
    b.refit_period = j.value("refit_period", b.refit_period);
    if (j.contains("gp")) {
      const json& g = j["gp"];
      auto& m = b.initial_model;
      m.time_params.theta1 = g.value("theta1", m.time_params.theta1);
      m.time_params.theta2 = g.value("theta2", m.time_params.theta2);
      m.noise_std = g.value("sigma", m.noise_std);
      m.window = g.value("window", m.window);
      // ell <= 0 means "derive from the grid spacing"
      m.beam_params.metric.ell_h = g.value("ell_h", 0.0);
      m.beam_params.metric.ell_v = g.value("ell_v", 0.0);
      b.fit.min_points = g.value("fit_min_points", b.fit.min_points);
      b.fit.restarts = g.value("fit_restarts", b.fit.restarts);
      b.fit.max_evals = g.value("fit_max_evals", b.fit.max_evals);
      b.fit.fit_subset = g.value("fit_subset", b.fit.fit_subset);
    } else {
      policy.bayes.initial_model.beam_params.metric = BeamIndexMetric{0.0, 0.0};
    }
  } else if (policy.kind != PolicyKind::oracle_full_sweep) {
    policy.subsample.phi = j.at("phi").get<double>();
  }
  return policy;
}

}  // namespace

BeamGrid ExperimentConfig::make_grid() const {
  return BeamGrid(geometry,
                  AngleGrid::from_degrees(azimuth_start_deg, azimuth_step_deg,
                                          azimuth_count, elevations_deg));
}

void ExperimentConfig::validate() const {
  geometry.validate();
  if (horizon < 1) throw std::runtime_error("config: horizon must be >= 1");
  if (seeds.empty()) throw std::runtime_error("config: no seeds");
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::runtime_error("config: seeds must be distinct");
  }
  if (speed_classes.empty()) throw std::runtime_error("config: no speed classes");
  if (policies.empty()) throw std::runtime_error("config: no policies");
  for (const auto& sc : speed_classes) sc.scenario.validate();
  for (const auto& p : policies) {
    if (p.kind == PolicyKind::spline || p.kind == PolicyKind::spatial_gpr ||
        p.kind == PolicyKind::random_subset) {
      if (p.subsample.phi <= 0.0 || p.subsample.phi > 1.0) {
        throw std::runtime_error("config: phi must be in (0, 1] for policy " +
                                 p.label());
      }
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config: parse error at line " +
                             std::to_string(line_of_byte_offset(text, e.byte)) +
                             ": " + e.what());
  }

  ExperimentConfig config;
  try {
    if (j.contains("grid")) {
      const json& g = j["grid"];
      config.geometry.m_h = g.value("m_h", config.geometry.m_h);
      config.geometry.m_v = g.value("m_v", config.geometry.m_v);
      config.geometry.d_h_over_lambda =
          g.value("d_h_over_lambda", config.geometry.d_h_over_lambda);
      config.geometry.d_v_over_lambda =
          g.value("d_v_over_lambda", config.geometry.d_v_over_lambda);
      config.azimuth_start_deg =
          g.value("azimuth_start_deg", config.azimuth_start_deg);
      config.azimuth_step_deg = g.value("azimuth_step_deg", config.azimuth_step_deg);
      config.azimuth_count = g.value("azimuth_count", config.azimuth_count);
      if (g.contains("elevations_deg")) {
        config.elevations_deg = g["elevations_deg"].get<std::vector<double>>();
      }
    }
    for (const auto& [name, spec] : j.at("speed_classes").items()) {
      config.speed_classes.push_back({name, parse_scenario(spec)});
    }
    std::sort(config.speed_classes.begin(), config.speed_classes.end(),
              [](const SpeedClass& a, const SpeedClass& b) {
                return a.name < b.name;
              });
    for (const auto& p : j.at("policies")) {
      config.policies.push_back(parse_policy(p));
    }
    config.horizon = j.value("horizon", config.horizon);
    if (j.contains("seeds")) {
      config.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    } else {
      const int count = j.value("seed_count", 10);
      for (int i = 0; i < count; ++i) config.seeds.push_back(i + 1);
    }
    config.warmup = j.value("warmup", config.warmup);
    config.warmup_alt = j.value("warmup_alt", config.warmup_alt);
    config.rolling_window = j.value("rolling_window", config.rolling_window);
    if (j.contains("snapshot_slots")) {
      config.snapshot_slots =
          j["snapshot_slots"].get<std::vector<std::int64_t>>();
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  config.validate();
  return config;
}

std::string default_config_json() {
  return R"({
  // Beam dictionary: 16 azimuth x 4 elevation DFT beams on a 16x16 panel.
  "grid": {
    "m_h": 16, "m_v": 16,
    "d_h_over_lambda": 0.5, "d_v_over_lambda": 0.5,
    "azimuth_start_deg": -56.25, "azimuth_step_deg": 7.5, "azimuth_count": 16,
    "elevations_deg": [0.0, 7.5, 15.0, 22.5]
  },

  // Scenario distributions per speed class: dominant-path angular drift
  // bound in degrees per slot. 3 paths, geometric gain decay, dB-domain
  // measurement noise.
  "speed_classes": {
    "slow":   { "max_azimuth_rate_deg": 0.25, "num_paths": 3, "gain_decay": 0.3, "noise_std_db": 0.5 },
    "medium": { "max_azimuth_rate_deg": 0.5,  "num_paths": 3, "gain_decay": 0.3, "noise_std_db": 0.5 },
    "fast":   { "max_azimuth_rate_deg": 0.75, "num_paths": 3, "gain_decay": 0.3, "noise_std_db": 0.5 }
  },

  "policies": [
    { "kind": "oracle_full_sweep" },
    { "kind": "random_subset", "variant": "phi=0.125", "phi": 0.125 },
    { "kind": "spline", "variant": "phi=0.25", "phi": 0.25 },
    { "kind": "spline", "variant": "phi=0.5", "phi": 0.5 },
    { "kind": "spatial_gpr", "variant": "phi=0.25", "phi": 0.25 },
    { "kind": "spatial_gpr", "variant": "phi=0.5", "phi": 0.5 },
    // Penalized-EI tracker. "low_overhead" caps the beamset at 16 of 64
    // beams and uses a steeper linear penalty; "high_accuracy" relaxes both.
    { "kind": "bayes_opt", "variant": "low_overhead",
      "penalty": { "c1": 0.2, "c2": 0.0, "n_max": 16 },
      "mc_samples": 2048,
      "refit_every_slot_below": 64, "refit_period": 5,
      "gp": { "theta1": 16.0, "theta2": 20.0, "sigma": 1.0, "window": 256,
              "fit_min_points": 8, "fit_restarts": 4, "fit_max_evals": 150,
              "fit_subset": 128 } },
    { "kind": "bayes_opt", "variant": "high_accuracy",
      "penalty": { "c1": 0.05, "c2": 0.0, "n_max": 64 },
      "mc_samples": 2048,
      "refit_every_slot_below": 64, "refit_period": 5,
      "gp": { "theta1": 16.0, "theta2": 20.0, "sigma": 1.0, "window": 256 } }
  ],

  "horizon": 500,
  "seed_count": 50,      // or an explicit "seeds": [ ... ] list
  "warmup": 0,           // slots excluded from the primary aggregate
  "warmup_alt": 20,      // second aggregate with the cold start excluded
  "rolling_window": 20,  // smoothing window for convergence plots
  "snapshot_slots": []   // e.g. [0, 30] to dump bayes_opt landscapes
})";
}

ExperimentConfig default_config() {
  const std::string text = default_config_json();
  json j = json::parse(text, nullptr, true, true);
  std::filesystem::path tmp =
      std::filesystem::temp_directory_path() / "beamtrack_default_config.json";
  {
    std::ofstream out(tmp);
    out << text;
  }
  return load_config(tmp);
}

namespace {

struct EpisodeTask {
  int policy_index;
  int speed_index;
  int seed_index;
};

struct EpisodeOutcome {
  bool ok = false;
  std::string error;
  EpisodeMetrics metrics;        // primary warmup
  EpisodeMetrics metrics_warm;   // warmup_alt
};

void write_slot_csv(const std::filesystem::path& file,
                    const std::vector<SlotRecord>& records) {
  std::ofstream out(file);
  out << csv::kSlotHeader << "\n";
  for (const auto& rec : records) {
    out << rec.slot << "," << rec.proposed.size() << "," << rec.chosen << ","
        << rec.true_best << "," << csv::format_double(rec.chosen_rsrp_db) << ","
        << csv::format_double(rec.best_rsrp_db) << ","
        << csv::format_double(rec.hypers.theta1) << ","
        << csv::format_double(rec.hypers.theta2) << ","
        << csv::format_double(rec.hypers.ell_h) << ","
        << csv::format_double(rec.hypers.ell_v) << ","
        << csv::format_double(rec.hypers.sigma) << "\n";
  }
}

void write_snapshot_csv(const std::filesystem::path& file,
                        const LandscapeSnapshot& snap, const BeamGrid& grid) {
  std::ofstream out(file);
  out << "beam,h,v,ei,post_mean,post_std,true_rsrp,proposed,predicted_best,"
         "true_best\n";
  for (int b = 0; b < grid.num_beams(); ++b) {
    const BeamIndex idx = grid.pair_index(b);
    const bool proposed = std::find(snap.proposed.begin(), snap.proposed.end(),
                                    b) != snap.proposed.end();
    out << b << "," << idx.h << "," << idx.v << ","
        << csv::format_double(snap.ei[b]) << ","
        << csv::format_double(snap.posterior_mean[b]) << ","
        << csv::format_double(snap.posterior_std[b]) << ","
        << csv::format_double(snap.true_rsrp[b]) << "," << (proposed ? 1 : 0)
        << "," << (b == snap.predicted_best ? 1 : 0) << ","
        << (b == snap.true_best ? 1 : 0) << "\n";
  }
}

struct Accumulator {
  double sum = 0.0, sum_sq = 0.0;
  int n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stddev() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / n - m * m));
  }
};

}  // namespace

ResultsTable run_experiments(const ExperimentConfig& config,
                             const std::filesystem::path& out_dir,
                             const RunOptions& options) {
  config.validate();
  const BeamGrid grid = config.make_grid();

  std::filesystem::create_directories(out_dir / "slots");
  if (!config.snapshot_slots.empty()) {
    std::filesystem::create_directories(out_dir / "snapshots");
  }

  std::vector<EpisodeTask> tasks;
  for (int p = 0; p < static_cast<int>(config.policies.size()); ++p) {
    for (int s = 0; s < static_cast<int>(config.speed_classes.size()); ++s) {
      for (int k = 0; k < static_cast<int>(config.seeds.size()); ++k) {
        tasks.push_back({p, s, k});
      }
    }
  }

  std::vector<EpisodeOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const EpisodeTask& task = tasks[i];
      const TrackerPolicy& policy = config.policies[task.policy_index];
      const SpeedClass& speed = config.speed_classes[task.speed_index];
      const std::uint64_t seed =
          config.seeds[task.seed_index] + options.seed_offset;
      EpisodeOutcome& outcome = outcomes[i];
      try {
        // Scenario depends only on (speed, seed) so policies are paired.
        Rng scenario_rng(mix_seed(0xA11CE5, task.speed_index, seed));
        const ChannelScenario scenario =
            random_scenario(speed.scenario, config.geometry, scenario_rng);

        Rng episode_rng(
            mix_seed(task.policy_index + 1, task.speed_index, seed));
        EpisodeOptions ep_options;
        ep_options.warmup = config.warmup;
        if (policy.kind == PolicyKind::bayes_opt && task.seed_index == 0) {
          ep_options.snapshot_slots = config.snapshot_slots;
        }
        EpisodeResult result =
            run_episode(policy, scenario, grid, config.horizon, episode_rng,
                        ep_options);

        const std::string stem = sanitize(policy.label()) + "__" + speed.name +
                                 "__seed" + std::to_string(seed);
        write_slot_csv(out_dir / "slots" / (stem + ".csv"),
                       result.metrics.per_slot);
        for (const auto& snap : result.snapshots) {
          write_snapshot_csv(out_dir / "snapshots" /
                                 (stem + "__slot" + std::to_string(snap.slot) +
                                  ".csv"),
                             snap, grid);
        }

        outcome.metrics_warm = compute_metrics(
            result.metrics.per_slot, config.warmup_alt, grid.num_beams());
        outcome.metrics = std::move(result.metrics);
        outcome.ok = true;
      } catch (const std::exception& e) {
        outcome.error = policy.label() + "/" + speed.name + "/seed" +
                        std::to_string(seed) + ": " + e.what();
      }
    }
  };

  const int workers =
      std::clamp<int>(options.parallelism, 1, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Single-writer reduction.
  ResultsTable table;
  for (int p = 0; p < static_cast<int>(config.policies.size()); ++p) {
    for (int s = 0; s < static_cast<int>(config.speed_classes.size()); ++s) {
      Accumulator acc, ovh, err, acc_w, ovh_w, err_w;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].policy_index != p || tasks[i].speed_index != s) continue;
        if (!outcomes[i].ok) {
          table.failures.push_back(outcomes[i].error);
          continue;
        }
        acc.add(outcomes[i].metrics.accuracy);
        ovh.add(outcomes[i].metrics.overhead);
        err.add(outcomes[i].metrics.rsrp_error_db);
        acc_w.add(outcomes[i].metrics_warm.accuracy);
        ovh_w.add(outcomes[i].metrics_warm.overhead);
        err_w.add(outcomes[i].metrics_warm.rsrp_error_db);
      }
      ResultsCell cell;
      cell.policy = config.policies[p].label();
      cell.speed = config.speed_classes[s].name;
      cell.seed_count = acc.n;
      cell.accuracy_mean = acc.mean();
      cell.accuracy_std = acc.stddev();
      cell.overhead_mean = ovh.mean();
      cell.overhead_std = ovh.stddev();
      cell.rsrp_error_mean = err.mean();
      cell.rsrp_error_std = err.stddev();
      cell.accuracy_warm = acc_w.mean();
      cell.overhead_warm = ovh_w.mean();
      cell.rsrp_error_warm = err_w.mean();
      table.cells.push_back(cell);
    }
  }

  {
    std::ofstream out(out_dir / "results.csv");
    out << csv::kResultsHeader << "\n";
    for (const auto& c : table.cells) {
      out << c.policy << "," << c.speed << "," << c.seed_count << ","
          << csv::format_double(c.accuracy_mean) << ","
          << csv::format_double(c.accuracy_std) << ","
          << csv::format_double(c.overhead_mean) << ","
          << csv::format_double(c.overhead_std) << ","
          << csv::format_double(c.rsrp_error_mean) << ","
          << csv::format_double(c.rsrp_error_std) << ","
          << csv::format_double(c.accuracy_warm) << ","
          << csv::format_double(c.overhead_warm) << ","
          << csv::format_double(c.rsrp_error_warm) << "\n";
    }
  }

  {
    json manifest;
    manifest["schema_version"] = csv::kSchemaVersion;
    manifest["num_beams"] = grid.num_beams();
    manifest["horizon"] = config.horizon;
    manifest["warmup"] = config.warmup;
    manifest["warmup_alt"] = config.warmup_alt;
    manifest["seed_offset"] = options.seed_offset;
    std::vector<std::uint64_t> seeds;
    for (auto s : config.seeds) seeds.push_back(s + options.seed_offset);
    manifest["seeds"] = seeds;
    std::vector<std::string> policy_labels;
    for (const auto& p : config.policies) policy_labels.push_back(p.label());
    manifest["policies"] = policy_labels;
    std::vector<std::string> speed_names;
    for (const auto& s : config.speed_classes) speed_names.push_back(s.name);
    manifest["speed_classes"] = speed_names;
    manifest["failures"] = table.failures;

    std::ostringstream cfg;
    cfg << config.geometry.m_h << "|" << config.geometry.m_v << "|"
        << config.horizon << "|" << config.seeds.size() << "|"
        << policy_labels.size();
    manifest["config_fingerprint"] = fingerprint(cfg.str());

    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }

  return table;
}

namespace {

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

struct RecomputedMetrics {
  double accuracy = 0.0, overhead = 0.0, rsrp_error = 0.0;
  int slots = 0;
};

RecomputedMetrics recompute_from_slots(const std::filesystem::path& file,
                                       int num_beams, int warmup) {
  const auto rows = read_csv(file);
  RecomputedMetrics m;
  double ovh = 0.0, err = 0.0;
  int correct = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const long slot = std::stol(r[0]);
    if (slot < warmup) continue;
    const int n_beams = std::stoi(r[1]);
    const int chosen = std::stoi(r[2]);
    const int true_best = std::stoi(r[3]);
    const double chosen_rsrp = std::stod(r[4]);
    const double best_rsrp = std::stod(r[5]);
    ++m.slots;
    if (chosen == true_best || chosen_rsrp == best_rsrp) ++correct;
    ovh += double(n_beams) / double(num_beams);
    err += best_rsrp - chosen_rsrp;
  }
  if (m.slots > 0) {
    m.accuracy = double(correct) / m.slots;
    m.overhead = ovh / m.slots;
    m.rsrp_error = err / m.slots;
  }
  return m;
}

}  // namespace

bool verify_run(const std::filesystem::path& run_dir,
                std::vector<std::string>* errors) {
  auto fail = [&](const std::string& msg) {
    if (errors) errors->push_back(msg);
  };

  json manifest;
  {
    std::ifstream in(run_dir / "manifest.json");
    if (!in) {
      fail("missing manifest.json");
      return false;
    }
    in >> manifest;
  }
  const int num_beams = manifest.at("num_beams").get<int>();
  const int warmup = manifest.at("warmup").get<int>();
  const std::vector<std::uint64_t> seeds =
      manifest.at("seeds").get<std::vector<std::uint64_t>>();

  const auto results = read_csv(run_dir / "results.csv");
  bool ok = true;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const auto& row = results[i];
    const std::string& policy = row[0];
    const std::string& speed = row[1];
    Accumulator acc, ovh, err;
    for (auto seed : seeds) {
      const std::filesystem::path file =
          run_dir / "slots" /
          (sanitize(policy) + "__" + speed + "__seed" + std::to_string(seed) +
           ".csv");
      if (!std::filesystem::exists(file)) continue;  // failed episode
      const RecomputedMetrics m = recompute_from_slots(file, num_beams, warmup);
      acc.add(m.accuracy);
      ovh.add(m.overhead);
      err.add(m.rsrp_error);
    }
    if (acc.n != std::stoi(row[2])) {
      fail(policy + "/" + speed + ": seed count mismatch");
      ok = false;
      continue;
    }
    auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    if (!close(acc.mean(), std::stod(row[3])) ||
        !close(ovh.mean(), std::stod(row[5])) ||
        !close(err.mean(), std::stod(row[7]))) {
      fail(policy + "/" + speed + ": aggregate/per-slot mismatch");
      ok = false;
    }
  }
  return ok;
}

}  // namespace beamtrack
