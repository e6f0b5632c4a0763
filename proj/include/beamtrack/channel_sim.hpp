#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "beamtrack/beam_grid.hpp"

namespace beamtrack {

using Rng = std::mt19937_64;

/// One propagation path: complex gain plus linear angular drift and a
/// Doppler-like phase rotation, all per slot.
struct PathComponent {
  Complex gain{1.0, 0.0};
  double azimuth_0 = 0.0;       // radians
  double elevation_0 = 0.0;     // radians
  double azimuth_rate = 0.0;    // radians / slot
  double elevation_rate = 0.0;  // radians / slot
  double gain_phase_rate = 0.0; // radians / slot
};

/// Synthetic effective-channel scenario: a handful of drifting paths seen
/// through the BS array, dominant path first.
struct ChannelScenario {
  std::vector<PathComponent> paths;
  ArrayGeometry geometry;
  double tx_power = 1.0;      // rho, linear
  double noise_std_db = 0.0;  // measurement noise std, dB domain
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// The channel row vector the BS perceives at one slot.
struct EffectiveChannel {
  std::int64_t slot = 0;
  CVector h_bar;  // length M_H * M_V
};

struct Observation {
  std::int64_t slot = 0;
  int beam_index = 0;  // flat grid index
  double rsrp_db = 0.0;
};

// Floor returned by true_rsrp_db when the beam is exactly orthogonal to the
// channel (linear RSRP exactly 0).
inline constexpr double kRsrpFloorDb = -300.0;

/// Deterministic effective channel at slot t: sum over paths of
/// gain * e^{i*phase_rate*t} * conj(steering(angles(t))), where the steering
/// vector has the DFT beam's phase structure but unit-modulus entries
/// (i.e. make_dft_beam scaled by sqrt(M_H*M_V)).
EffectiveChannel channel_at(const ChannelScenario& scenario, std::int64_t t);

/// Ground-truth RSRP in dB: 10*log10(rho * |h_bar . b|^2), floored at
/// kRsrpFloorDb when the inner product is exactly zero.
double true_rsrp_db(const ChannelScenario& scenario,
                    const EffectiveChannel& channel, const BeamGrid& grid,
                    int beam_index);

/// Noisy measurements for a beamset; one Observation per beam, Gaussian
/// dB-domain noise, independent across beams, deterministic per rng stream.
std::vector<Observation> measure(const ChannelScenario& scenario,
                                 const EffectiveChannel& channel,
                                 const BeamGrid& grid,
                                 const std::vector<int>& beamset, Rng& rng);

/// Parameters of the scenario-generating distribution (per speed class).
struct ScenarioParams {
  int num_paths = 3;
  double gain_decay = 0.3;          // geometric decay of path gains
  double max_azimuth_rate_deg = 0.25;    // dominant-path drift bound, deg/slot
  double max_elevation_rate_deg = 0.05;  // deg/slot
  double azimuth_span_deg = 100.0;  // initial azimuth drawn in +-span/2
  double elevation_min_deg = 0.0;
  double elevation_max_deg = 22.5;
  double max_phase_rate = 0.05;     // rad/slot
  double tx_power = 1.0;
  double noise_std_db = 0.5;

  void validate() const;
};

/// Draws a random scenario: dominant path gain magnitude 1, later paths
/// geometrically decaying with random phases, rates uniform within the
/// class bounds (secondary-path angular rates share the dominant bound).
ChannelScenario random_scenario(const ScenarioParams& params,
                                const ArrayGeometry& geometry, Rng& rng);

}  // namespace beamtrack
