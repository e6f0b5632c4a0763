#include "beamtrack/acquisition.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamtrack {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Greedy running state: per-sample max over the current prefix.
double increment_value(const AcquisitionContext& ctx, const Vector& current_max,
                       int candidate, double f_star) {
  const auto col = ctx.samples().col(candidate);
  double acc = 0.0;
  const int s = ctx.num_samples();
  for (int i = 0; i < s; ++i) {
    const double m = std::max(current_max(i), col(i)) - f_star;
    if (m > 0.0) acc += m;
  }
  return acc / double(s);
}

}  // namespace

double ei_single(double mean, double std, double f_star) {
  if (std < 0.0) throw std::invalid_argument("ei_single: negative std");
  const double delta = mean - f_star;
  if (std == 0.0) return std::max(delta, 0.0);
  const double z = delta / std;
  return delta * normal_cdf(z) + std * normal_pdf(z);
}

double believed_best(const Posterior& posterior) {
  if (posterior.mean.size() == 0) {
    throw std::invalid_argument("believed_best: empty posterior");
  }
  return posterior.mean.maxCoeff();
}

AcquisitionContext::AcquisitionContext(Posterior posterior, int mc_samples,
                                       std::uint64_t seed)
    : posterior_(std::move(posterior)), f_star_(believed_best(posterior_)) {
  if (mc_samples < 1) {
    throw std::invalid_argument("AcquisitionContext: mc_samples < 1");
  }
  const int nb = num_beams();

  // Joint sampling needs a factor of the (PSD, possibly singular) posterior
  // covariance; reuse the jittered Cholesky.
  const auto chol = detail::cholesky_with_jitter(posterior_.cross_cov);
  const Matrix factor = chol.llt.matrixL();

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(mc_samples, nb);
  for (int i = 0; i < mc_samples; ++i) {
    for (int j = 0; j < nb; ++j) z(i, j) = normal(rng);
  }
  samples_ = z * factor.transpose();
  samples_.rowwise() += posterior_.mean.transpose();
}

double j_estimate(const AcquisitionContext& ctx, const std::vector<int>& beamset) {
  if (beamset.empty()) throw std::invalid_argument("j_estimate: empty beamset");
  const int s = ctx.num_samples();
  double acc = 0.0;
  for (int i = 0; i < s; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int b : beamset) best = std::max(best, ctx.samples()(i, b));
    const double imp = best - ctx.f_star();
    if (imp > 0.0) acc += imp;
  }
  return acc / double(s);
}

BeamsetChoice greedy_fixed_size(const AcquisitionContext& ctx, int n) {
  const int nb = ctx.num_beams();
  if (n < 1 || n > nb) {
    throw std::invalid_argument("greedy_fixed_size: n out of range");
  }
  BeamsetChoice choice;
  std::vector<bool> used(nb, false);
  Vector current_max =
      Vector::Constant(ctx.num_samples(), -std::numeric_limits<double>::infinity());

  for (int k = 0; k < n; ++k) {
    int best_beam = -1;
    double best_j = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < nb; ++b) {
      if (used[b]) continue;
      const double j = increment_value(ctx, current_max, b, ctx.f_star());
      if (j > best_j) {  // ties keep the lowest flat index
        best_j = j;
        best_beam = b;
      }
    }
    used[best_beam] = true;
    choice.beams.push_back(best_beam);
    choice.j_values.push_back(best_j);
    current_max = current_max.cwiseMax(ctx.samples().col(best_beam));
  }
  choice.objective = choice.j_values.back();
  return choice;
}

BeamsetChoice choose_beamset(const AcquisitionContext& ctx,
                             const OverheadPenalty& penalty) {
  const int nb = ctx.num_beams();
  const int cap = std::max(std::min(penalty.n_max, nb), 1);

  // Same greedy recursion as greedy_fixed_size, grown lazily so the search
  // stops as soon as the penalized objective stalls; the result is always a
  // prefix of greedy_fixed_size(cap).
  BeamsetChoice choice;
  std::vector<bool> used(nb, false);
  Vector current_max =
      Vector::Constant(ctx.num_samples(), -std::numeric_limits<double>::infinity());
  double objective = -std::numeric_limits<double>::infinity();

  for (int n = 1; n <= cap; ++n) {
    int best_beam = -1;
    double best_j = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < nb; ++b) {
      if (used[b]) continue;
      const double j = increment_value(ctx, current_max, b, ctx.f_star());
      if (j > best_j) {  // ties keep the lowest flat index
        best_j = j;
        best_beam = b;
      }
    }
    const double next_objective = best_j - penalty(n);
    if (n > 1 && next_objective <= objective) break;  // strict improvement rule
    used[best_beam] = true;
    choice.beams.push_back(best_beam);
    choice.j_values.push_back(best_j);
    current_max = current_max.cwiseMax(ctx.samples().col(best_beam));
    objective = next_objective;
  }
  choice.objective = objective;
  return choice;
}

}  // namespace beamtrack
