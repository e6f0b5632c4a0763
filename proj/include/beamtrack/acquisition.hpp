#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "beamtrack/gp_core.hpp"

namespace beamtrack {

/// Closed-form expected improvement for a single Gaussian belief:
/// (mu - f_star) * Phi(z) + s * phi(z), z = (mu - f_star)/s;
/// degenerates to max(mu - f_star, 0) at s = 0.
double ei_single(double mean, double std, double f_star);

/// Per-slot acquisition state: the posterior, the believed best, and one
/// joint sample matrix reused by every set-EI evaluation in the slot
/// (common random numbers). Immutable once built.
class AcquisitionContext {
 public:
  AcquisitionContext(Posterior posterior, int mc_samples, std::uint64_t seed);

  const Posterior& posterior() const { return posterior_; }
  double f_star() const { return f_star_; }
  int num_beams() const { return static_cast<int>(posterior_.mean.size()); }
  int num_samples() const { return static_cast<int>(samples_.rows()); }

  // samples() is mc_samples x num_beams: one joint posterior draw per row.
  const Matrix& samples() const { return samples_; }

  double ei_single_beam(int beam) const {
    return ei_single(posterior_.mean(beam), posterior_.std(beam), f_star_);
  }

 private:
  Posterior posterior_;
  double f_star_;
  Matrix samples_;
};

/// Believed best f*: the max posterior mean across beams.
double believed_best(const Posterior& posterior);

/// Convex increasing reporting-overhead penalty h(n) = c1*n + c2*n^2, with a
/// hard cap: h(n) = +inf for n > n_max.
struct OverheadPenalty {
  double c1 = 0.2;
  double c2 = 0.0;
  int n_max = 16;

  double operator()(int n) const {
    if (n > n_max) return std::numeric_limits<double>::infinity();
    return c1 * n + c2 * double(n) * double(n);
  }
};

/// Result of the greedy beamset search: beams in insertion order and the
/// set-EI estimate of each greedy prefix.
struct BeamsetChoice {
  std::vector<int> beams;
  std::vector<double> j_values;  // J(B^g(1)), J(B^g(2)), ...
  double objective = 0.0;        // final J - h
};

/// Monte-Carlo set expected improvement over the shared sample cache:
/// mean over samples of [max_{b in B} z(b) - f_star]^+. Deterministic
/// within a slot; evaluated pathwise, also for singletons, so monotonicity
/// holds exactly against larger sets.
double j_estimate(const AcquisitionContext& ctx, const std::vector<int>& beamset);

/// Greedy fixed-size maximization of J: iteratively adds the beam with the
/// largest increment; ties break toward the lowest flat index.
BeamsetChoice greedy_fixed_size(const AcquisitionContext& ctx, int n);

/// Penalized beamset choice: grows the greedy set from the best singleton
/// and stops at the first n where J(B(n)) - h(n) fails to strictly improve
/// (or at n_max), returning the previous prefix. Never returns an empty set.
BeamsetChoice choose_beamset(const AcquisitionContext& ctx,
                             const OverheadPenalty& penalty);

}  // namespace beamtrack
