#include "beamtrack/channel_sim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamtrack {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

void ChannelScenario::validate() const {
  if (paths.empty()) {
    throw std::invalid_argument("ChannelScenario: need at least one path");
  }
  const double dominant = std::abs(paths.front().gain);
  if (dominant <= 0.0) {
    throw std::invalid_argument("ChannelScenario: zero dominant gain");
  }
  for (const auto& p : paths) {
    if (std::abs(p.gain) > dominant + 1e-12) {
      throw std::invalid_argument(
          "ChannelScenario: paths must be ordered dominant-first");
    }
  }
  if (tx_power <= 0.0 || noise_std_db < 0.0) {
    throw std::invalid_argument("ChannelScenario: bad power/noise");
  }
  geometry.validate();
}

void ScenarioParams::validate() const {
  if (num_paths < 1) throw std::invalid_argument("ScenarioParams: num_paths");
  if (gain_decay < 0.0 || gain_decay >= 1.0) {
    throw std::invalid_argument("ScenarioParams: gain_decay in [0,1)");
  }
  if (max_azimuth_rate_deg < 0.0 || max_elevation_rate_deg < 0.0 ||
      noise_std_db < 0.0 || tx_power <= 0.0) {
    throw std::invalid_argument("ScenarioParams: invalid bounds");
  }
}

EffectiveChannel channel_at(const ChannelScenario& scenario, std::int64_t t) {
  if (t < 0) throw std::invalid_argument("channel_at: t must be >= 0");
  const double scale = std::sqrt(double(scenario.geometry.num_elements()));
  CVector h_bar = CVector::Zero(scenario.geometry.num_elements());
  for (const auto& path : scenario.paths) {
    const double az = path.azimuth_0 + path.azimuth_rate * double(t);
    const double el = path.elevation_0 + path.elevation_rate * double(t);
    const CVector steer =
        scale * make_dft_beam(scenario.geometry, az, el);
    const Complex rot = std::polar(1.0, path.gain_phase_rate * double(t));
    h_bar += path.gain * rot * steer.conjugate();
  }
  return {t, std::move(h_bar)};
}

double true_rsrp_db(const ChannelScenario& scenario,
                    const EffectiveChannel& channel, const BeamGrid& grid,
                    int beam_index) {
  if (channel.h_bar.size() != grid.geometry().num_elements()) {
    throw std::invalid_argument("true_rsrp_db: channel/grid dimension mismatch");
  }
  if (beam_index < 0 || beam_index >= grid.num_beams()) {
    throw std::invalid_argument("true_rsrp_db: beam index out of range");
  }
  // h_bar is a row vector; the received amplitude is h_bar . b.
  const Complex inner = channel.h_bar.transpose() * grid.beam(beam_index);
  const double power = scenario.tx_power * std::norm(inner);
  if (power == 0.0) return kRsrpFloorDb;
  return 10.0 * std::log10(power);
}

std::vector<Observation> measure(const ChannelScenario& scenario,
                                 const EffectiveChannel& channel,
                                 const BeamGrid& grid,
                                 const std::vector<int>& beamset, Rng& rng) {
  if (beamset.empty()) {
    throw std::invalid_argument("measure: empty beamset");
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Observation> out;
  out.reserve(beamset.size());
  for (int b : beamset) {
    double rsrp = true_rsrp_db(scenario, channel, grid, b);
    if (scenario.noise_std_db > 0.0) {
      rsrp += scenario.noise_std_db * noise(rng);
    }
    out.push_back({channel.slot, b, rsrp});
  }
  return out;
}

ChannelScenario random_scenario(const ScenarioParams& params,
                                const ArrayGeometry& geometry, Rng& rng) {
  params.validate();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> uniform01(0.0, 1.0);

  ChannelScenario scenario;
  scenario.geometry = geometry;
  scenario.tx_power = params.tx_power;
  scenario.noise_std_db = params.noise_std_db;

  double magnitude = 1.0;
  for (int i = 0; i < params.num_paths; ++i) {
    PathComponent path;
    const double phase = std::numbers::pi * unit(rng);
    path.gain = std::polar(magnitude, i == 0 ? 0.0 : phase);
    path.azimuth_0 = 0.5 * params.azimuth_span_deg * unit(rng) * kDegToRad;
    path.elevation_0 =
        (params.elevation_min_deg +
         (params.elevation_max_deg - params.elevation_min_deg) * uniform01(rng)) *
        kDegToRad;
    path.azimuth_rate = params.max_azimuth_rate_deg * unit(rng) * kDegToRad;
    path.elevation_rate = params.max_elevation_rate_deg * unit(rng) * kDegToRad;
    path.gain_phase_rate = params.max_phase_rate * unit(rng);
    scenario.paths.push_back(path);
    magnitude *= params.gain_decay;
  }
  scenario.validate();
  return scenario;
}

}  // namespace beamtrack
