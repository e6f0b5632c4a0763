#include "beamtrack/gp_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamtrack {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double matern_bessel(double nu, double d) {
  const double arg = std::sqrt(2.0 * nu) * d;
  const double log_coeff =
      -std::lgamma(nu) - (nu - 1.0) * std::numbers::ln2 + nu * std::log(arg);
  const double bessel = std::cyl_bessel_k(nu, arg);
  if (bessel <= 0.0) return 0.0;
  return std::exp(log_coeff + std::log(bessel));
}

}  // namespace

double matern_correlation(double nu, double d) {
  if (nu <= 0.0) throw std::invalid_argument("matern_correlation: nu <= 0");
  if (d <= 0.0) return 1.0;
  if (nu == 0.5) return std::exp(-d);
  if (nu == 1.5) {
    const double a = std::numbers::sqrt3 * d;
    return (1.0 + a) * std::exp(-a);
  }
  if (nu == 2.5) {
    const double a = std::sqrt(5.0) * d;
    return (1.0 + a + a * a / 3.0) * std::exp(-a);
  }
  return matern_bessel(nu, d);
}

PriorMean prior_mean_from_history(const std::vector<Observation>& history,
                                  const BeamGrid& grid) {
  if (history.empty()) return PriorMean{};

  std::vector<double> sum(grid.num_beams(), 0.0);
  std::vector<int> count(grid.num_beams(), 0);
  double global_sum = 0.0;
  for (const auto& obs : history) {
    sum.at(obs.beam_index) += obs.rsrp_db;
    count.at(obs.beam_index) += 1;
    global_sum += obs.rsrp_db;
  }
  const double global_mean = global_sum / double(history.size());
  std::vector<double> per_beam(grid.num_beams(), global_mean);
  for (int b = 0; b < grid.num_beams(); ++b) {
    if (count[b] > 0) per_beam[b] = sum[b] / count[b];
  }
  return PriorMean{std::move(per_beam), global_mean};
}

void GpModel::add_observations(const std::vector<Observation>& obs) {
  for (const auto& o : obs) {
    if (!buffer.empty() && o.slot < buffer.back().slot) {
      throw std::invalid_argument("GpModel: observations must be chronological");
    }
    buffer.push_back(o);
  }
  if (static_cast<int>(buffer.size()) > window) {
    buffer.erase(buffer.begin(),
                 buffer.begin() + (static_cast<int>(buffer.size()) - window));
  }
}

namespace detail {

CholResult cholesky_with_jitter(const Matrix& k) {
  const auto n = k.rows();
  const double scale = k.trace() / double(n);
  CholResult result;
  result.llt.compute(k);
  if (result.llt.info() == Eigen::Success) return result;

  double jitter = 1e-10 * scale;
  const double max_jitter = 1e-4 * scale;
  while (jitter <= max_jitter * (1.0 + 1e-12)) {
    Matrix kj = k;
    kj.diagonal().array() += jitter;
    result.llt.compute(kj);
    if (result.llt.info() == Eigen::Success) {
      result.jitter = jitter;
      return result;
    }
    jitter *= 10.0;
  }
  throw std::runtime_error(
      "cholesky_with_jitter: factorization failed (n=" + std::to_string(n) +
      ", trace/n=" + std::to_string(scale) + ", max jitter exhausted)");
}

Matrix observation_gram(const GpModel& model, const BeamGrid& grid,
                        const std::vector<Observation>& buffer) {
  const int n = static_cast<int>(buffer.size());
  Matrix k(n, n);
  const double sigma2 = model.noise_std * model.noise_std;
  for (int i = 0; i < n; ++i) {
    const BeamIndex bi = grid.pair_index(buffer[i].beam_index);
    for (int j = 0; j <= i; ++j) {
      const BeamIndex bj = grid.pair_index(buffer[j].beam_index);
      double v = time_kernel(model.time_params, double(buffer[i].slot),
                             double(buffer[j].slot)) *
                 beam_kernel(model.beam_params, bi, bj);
      if (i == j) v += sigma2;
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace detail

Posterior posterior_at_slot(const GpModel& model, const BeamGrid& grid,
                            std::int64_t t) {
  if (!model.buffer.empty() && t < model.buffer.back().slot) {
    throw std::invalid_argument(
        "posterior_at_slot: query slot precedes buffered history");
  }
  const int nb = grid.num_beams();

  // Prior Gram over all beams at slot t (time factor is theta1 on the
  // diagonal block since t == t').
  Matrix prior_gram(nb, nb);
  for (int i = 0; i < nb; ++i) {
    const BeamIndex bi = grid.pair_index(i);
    for (int j = 0; j <= i; ++j) {
      const double v = model.time_params.theta1 *
                       beam_kernel(model.beam_params, bi, grid.pair_index(j));
      prior_gram(i, j) = v;
      prior_gram(j, i) = v;
    }
  }

  Posterior post;
  post.slot = t;
  post.mean.resize(nb);
  for (int i = 0; i < nb; ++i) post.mean(i) = model.prior_mean(i);

  if (model.buffer.empty()) {
    post.cross_cov = std::move(prior_gram);
    post.std = post.cross_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return post;
  }

  const int n = static_cast<int>(model.buffer.size());
  const Matrix k_obs = detail::observation_gram(model, grid, model.buffer);
  const auto chol = detail::cholesky_with_jitter(k_obs);

  Matrix k_star(n, nb);
  for (int i = 0; i < n; ++i) {
    const BeamIndex bi = grid.pair_index(model.buffer[i].beam_index);
    const double kt = time_kernel(model.time_params,
                                  double(model.buffer[i].slot), double(t));
    for (int j = 0; j < nb; ++j) {
      k_star(i, j) = kt * beam_kernel(model.beam_params, bi, grid.pair_index(j));
    }
  }

  Vector residual(n);
  for (int i = 0; i < n; ++i) {
    residual(i) =
        model.buffer[i].rsrp_db - model.prior_mean(model.buffer[i].beam_index);
  }

  const Vector alpha = chol.llt.solve(residual);
  post.mean += k_star.transpose() * alpha;

  const Matrix v = chol.llt.matrixL().solve(k_star);
  post.cross_cov = prior_gram - v.transpose() * v;
  post.std = post.cross_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return post;
}

double log_marginal_likelihood(const GpModel& model, const BeamGrid& grid) {
  if (model.buffer.empty()) {
    throw std::invalid_argument("log_marginal_likelihood: empty buffer");
  }
  const int n = static_cast<int>(model.buffer.size());
  const Matrix k = detail::observation_gram(model, grid, model.buffer);
  const auto chol = detail::cholesky_with_jitter(k);

  Vector residual(n);
  for (int i = 0; i < n; ++i) {
    residual(i) =
        model.buffer[i].rsrp_db - model.prior_mean(model.buffer[i].beam_index);
  }
  const Vector alpha = chol.llt.solve(residual);
  const double log_det =
      2.0 * Matrix(chol.llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * residual.dot(alpha) - 0.5 * log_det - 0.5 * n * kLog2Pi;
}

namespace {

// Hyperparameter vector in log space: [theta1, theta2, ell_H, ell_V, sigma].
constexpr int kNumHypers = 5;

Vector pack(const GpModel& m) {
  Vector x(kNumHypers);
  x << std::log(m.time_params.theta1), std::log(m.time_params.theta2),
      std::log(m.beam_params.metric.ell_h), std::log(m.beam_params.metric.ell_v),
      std::log(m.noise_std);
  return x;
}

void unpack(const Vector& x, const GpHyperBounds& b, GpModel& m) {
  auto clamp_exp = [](double lx, double lo, double hi) {
    return std::clamp(std::exp(lx), lo, hi);
  };
  m.time_params.theta1 = clamp_exp(x(0), b.theta1_min, b.theta1_max);
  m.time_params.theta2 = clamp_exp(x(1), b.theta2_min, b.theta2_max);
  m.beam_params.metric.ell_h = clamp_exp(x(2), b.ell_min, b.ell_max);
  m.beam_params.metric.ell_v = clamp_exp(x(3), b.ell_min, b.ell_max);
  m.noise_std = clamp_exp(x(4), b.sigma_min, b.sigma_max);
}

// Precomputed pairwise statistics for fast likelihood evaluation during the
// fit: only the hyperparameters change between evaluations.
struct FitWorkspace {
  Matrix dt2;   // (t_i - t_j)^2
  Matrix dh2;   // (h_i - h_j)^2
  Matrix dv2;   // (v_i - v_j)^2
  Vector values;
  Vector prior;
  double nu = 1.5;
};

FitWorkspace make_workspace(const GpModel& model, const BeamGrid& grid,
                            const std::vector<Observation>& buffer) {
  const int n = static_cast<int>(buffer.size());
  FitWorkspace ws;
  ws.dt2.resize(n, n);
  ws.dh2.resize(n, n);
  ws.dv2.resize(n, n);
  ws.values.resize(n);
  ws.prior.resize(n);
  ws.nu = model.beam_params.nu;
  for (int i = 0; i < n; ++i) {
    const BeamIndex bi = grid.pair_index(buffer[i].beam_index);
    ws.values(i) = buffer[i].rsrp_db;
    ws.prior(i) = model.prior_mean(buffer[i].beam_index);
    for (int j = 0; j < n; ++j) {
      const BeamIndex bj = grid.pair_index(buffer[j].beam_index);
      const double dt = double(buffer[i].slot - buffer[j].slot);
      ws.dt2(i, j) = dt * dt;
      ws.dh2(i, j) = double((bi.h - bj.h) * (bi.h - bj.h));
      ws.dv2(i, j) = double((bi.v - bj.v) * (bi.v - bj.v));
    }
  }
  return ws;
}

double negative_log_likelihood(const FitWorkspace& ws, const Vector& x,
                               const GpHyperBounds& bounds) {
  GpModel probe;
  probe.beam_params.nu = ws.nu;
  unpack(x, bounds, probe);

  const int n = static_cast<int>(ws.values.size());
  const double th2sq = probe.time_params.theta2 * probe.time_params.theta2;

  Matrix k = (-ws.dt2 / th2sq).array().exp().matrix() * probe.time_params.theta1;
  const Matrix dist = (ws.dh2 / probe.beam_params.metric.ell_h +
                       ws.dv2 / probe.beam_params.metric.ell_v)
                          .cwiseSqrt();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      k(i, j) *= matern_correlation(ws.nu, dist(i, j));
    }
  }
  k.diagonal().array() += probe.noise_std * probe.noise_std;

  try {
    const auto chol = detail::cholesky_with_jitter(k);
    const Vector residual = ws.values - ws.prior;
    const Vector alpha = chol.llt.solve(residual);
    const double log_det =
        2.0 * Matrix(chol.llt.matrixL()).diagonal().array().log().sum();
    return 0.5 * residual.dot(alpha) + 0.5 * log_det + 0.5 * n * kLog2Pi;
  } catch (const std::runtime_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Plain Nelder-Mead; good enough for 5 smooth parameters.
template <typename F>
std::pair<Vector, double> nelder_mead(F&& objective, const Vector& start,
                                      double step, int max_evals) {
  const int dim = static_cast<int>(start.size());
  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.reserve(dim + 1);
  for (int i = 0; i <= dim; ++i) {
    Vector p = start;
    if (i > 0) p(i - 1) += step;
    simplex.push_back(p);
    values.push_back(objective(p));
  }
  int evals = dim + 1;

  auto order = [&] {
    std::vector<int> idx(simplex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    std::vector<Vector> s2;
    std::vector<double> v2;
    for (int i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex.swap(s2);
    values.swap(v2);
  };

  order();
  while (evals < max_evals) {
    if (std::abs(values.back() - values.front()) <
        1e-7 * (1.0 + std::abs(values.front()))) {
      break;
    }
    Vector centroid = Vector::Zero(dim);
    for (int i = 0; i < dim; ++i) centroid += simplex[i];
    centroid /= double(dim);

    const Vector reflected = centroid + (centroid - simplex.back());
    const double fr = objective(reflected);
    ++evals;
    if (fr < values.front()) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex.back());
      const double fe = objective(expanded);
      ++evals;
      if (fe < fr) {
        simplex.back() = expanded;
        values.back() = fe;
      } else {
        simplex.back() = reflected;
        values.back() = fr;
      }
    } else if (fr < values[dim - 1]) {
      simplex.back() = reflected;
      values.back() = fr;
    } else {
      const Vector contracted = centroid + 0.5 * (simplex.back() - centroid);
      const double fc = objective(contracted);
      ++evals;
      if (fc < values.back()) {
        simplex.back() = contracted;
        values.back() = fc;
      } else {
        for (int i = 1; i <= dim; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          values[i] = objective(simplex[i]);
          ++evals;
        }
      }
    }
    order();
  }
  return {simplex.front(), values.front()};
}

}  // namespace

GpModel fit_hyperparameters(const GpModel& model, const BeamGrid& grid,
                            const GpFitOptions& options, Rng& rng) {
  if (static_cast<int>(model.buffer.size()) < options.min_points) {
    return model;
  }

  // Fit on the most recent fit_subset points to cap the per-refit cost;
  // the posterior still conditions on the full window.
  std::vector<Observation> fit_buffer = model.buffer;
  if (static_cast<int>(fit_buffer.size()) > options.fit_subset) {
    fit_buffer.erase(fit_buffer.begin(),
                     fit_buffer.end() - options.fit_subset);
  }
  const FitWorkspace ws = make_workspace(model, grid, fit_buffer);
  const GpHyperBounds& bounds = options.bounds;
  auto objective = [&](const Vector& x) {
    return negative_log_likelihood(ws, x, bounds);
  };

  const Vector incumbent = pack(model);
  const double incumbent_nll = objective(incumbent);

  Vector best = incumbent;
  double best_nll = incumbent_nll;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_in = [&](double lo, double hi) {
    return std::log(lo) + unit(rng) * (std::log(hi) - std::log(lo));
  };

  for (int s = 0; s < options.restarts; ++s) {
    Vector start = incumbent;
    if (s > 0) {
      start(0) = random_in(bounds.theta1_min, bounds.theta1_max);
      start(1) = random_in(bounds.theta2_min, bounds.theta2_max);
      start(2) = random_in(bounds.ell_min, bounds.ell_max);
      start(3) = random_in(bounds.ell_min, bounds.ell_max);
      start(4) = random_in(bounds.sigma_min, bounds.sigma_max);
    }
    auto [x, nll] = nelder_mead(objective, start, 0.4, options.max_evals);
    if (nll < best_nll) {
      best = x;
      best_nll = nll;
    }
  }

  if (best_nll >= incumbent_nll) return model;  // never accept a regression
  GpModel fitted = model;
  unpack(best, bounds, fitted);
  return fitted;
}

}  // namespace beamtrack
