#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "beamtrack/beam_grid.hpp"
#include "beamtrack/channel_sim.hpp"

namespace beamtrack {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Squared-exponential kernel in time: theta1 * exp(-((t-t')/theta2)^2).
/// 1/theta2 acts as the forgetting rate.
struct TimeKernelParams {
  double theta1 = 1.0;  // output scale
  double theta2 = 20.0; // time length scale, slots
};

inline double time_kernel(const TimeKernelParams& p, double t, double tp) {
  const double z = (t - tp) / p.theta2;
  return p.theta1 * std::exp(-z * z);
}

/// Matern kernel over the beam-index metric; value 1 at distance 0.
struct BeamKernelParams {
  double nu = 1.5;  // smoothness, fixed (not fitted)
  BeamIndexMetric metric{};
};

/// Matern correlation at distance d >= 0 for smoothness nu.
/// Closed forms for nu in {1/2, 3/2, 5/2}; modified-Bessel form otherwise.
double matern_correlation(double nu, double d);

inline double beam_kernel(const BeamKernelParams& p, const BeamIndex& a,
                          const BeamIndex& b) {
  return matern_correlation(p.nu, p.metric(a, b));
}

/// Constant-in-time prior mean over beams, built from historical averages.
class PriorMean {
 public:
  PriorMean() = default;
  PriorMean(std::vector<double> per_beam, double fallback)
      : per_beam_(std::move(per_beam)), fallback_(fallback) {}

  double operator()(int flat_beam_index) const {
    if (flat_beam_index >= 0 &&
        flat_beam_index < static_cast<int>(per_beam_.size())) {
      return per_beam_[flat_beam_index];
    }
    return fallback_;
  }

 private:
  std::vector<double> per_beam_;  // empty => constant fallback everywhere
  double fallback_ = 0.0;
};

/// Per-beam mean of historical dB measurements; beams without history get
/// the global mean; empty history gives the constant-0 prior.
PriorMean prior_mean_from_history(const std::vector<Observation>& history,
                                  const BeamGrid& grid);

struct GpHyperBounds {
  double theta1_min = 1e-2, theta1_max = 1e4;
  double theta2_min = 0.5, theta2_max = 200.0;
  double ell_min = 0.1, ell_max = 100.0;
  double sigma_min = 1e-3, sigma_max = 10.0;
};

struct GpFitOptions {
  int min_points = 8;    // below this, fit returns the incumbent
  int restarts = 4;      // multi-start count (incumbent + random starts)
  int max_evals = 150;   // likelihood evaluations per start
  int fit_subset = 128;  // fit on the most recent points only (cost cap)
  GpHyperBounds bounds{};
};

/// The spatio-temporal surrogate: product kernel, dB-domain noise, rolling
/// observation window. Value type; copy freely, no shared state.
struct GpModel {
  TimeKernelParams time_params{};
  BeamKernelParams beam_params{};
  double noise_std = 1.0;  // sigma, dB
  PriorMean prior_mean{};
  int window = 256;
  std::vector<Observation> buffer;  // chronological, |buffer| <= window

  // Appends observations (must not precede the last buffered slot) and
  // drops the oldest entries beyond the window.
  void add_observations(const std::vector<Observation>& obs);
};

/// Posterior over every beam at a single slot.
struct Posterior {
  std::int64_t slot = 0;
  Vector mean;       // dB, one entry per beam
  Vector std;        // dB
  Matrix cross_cov;  // full covariance over beams at this slot
};

/// Exact GP conditioning of all grid beams at slot t on the buffered
/// observations. Empty buffer returns the prior. Throws on factorization
/// failure after jitter escalation.
Posterior posterior_at_slot(const GpModel& model, const BeamGrid& grid,
                            std::int64_t t);

/// Log marginal likelihood of the buffered observations under the current
/// hyperparameters. Requires a non-empty buffer.
double log_marginal_likelihood(const GpModel& model, const BeamGrid& grid);

/// Multi-start maximum-likelihood update of (theta1, theta2, ell_H, ell_V,
/// sigma) in log space; nu stays fixed. Never returns a model with lower
/// likelihood than the incumbent.
GpModel fit_hyperparameters(const GpModel& model, const BeamGrid& grid,
                            const GpFitOptions& options, Rng& rng);

namespace detail {
// Cholesky with escalating jitter: starts at 1e-10 * trace/n, escalates
// x10 up to 1e-4 * trace/n, throws past that. Returns the factor and the
// jitter actually applied (exposed so oracle tests can mirror it).
struct CholResult {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;
};
CholResult cholesky_with_jitter(const Matrix& k);

// Covariance matrix over the buffered observations (kernel + sigma^2 I).
Matrix observation_gram(const GpModel& model, const BeamGrid& grid,
                        const std::vector<Observation>& buffer);
}  // namespace detail

}  // namespace beamtrack
