#include "beamtrack/spline.hpp"

#include <stdexcept>

namespace beamtrack {

CubicSpline1D::CubicSpline1D(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.empty()) {
    throw std::invalid_argument("CubicSpline1D: bad knot arrays");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (x_[i] <= x_[i - 1]) {
      throw std::invalid_argument("CubicSpline1D: x must be strictly increasing");
    }
  }
  const std::size_t n = x_.size();
  if (n < 4) {
    linear_ = true;
    return;
  }

  // Tridiagonal solve for natural boundary conditions.
  second_.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
    const double p = sig * second_[i - 1] + 2.0;
    second_[i] = (sig - 1.0) / p;
    const double slope_right = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    const double slope_left = (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
    u[i] = (6.0 * (slope_right - slope_left) / (x_[i + 1] - x_[i - 1]) -
            sig * u[i - 1]) /
           p;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    second_[i] = second_[i] * second_[i + 1] + u[i];
  }
}

double CubicSpline1D::operator()(double x) const {
  const std::size_t n = x_.size();
  if (n == 1) return y_[0];

  std::size_t hi = 1;
  while (hi + 1 < n && x_[hi] < x) ++hi;
  const std::size_t lo = hi - 1;
  const double h = x_[hi] - x_[lo];

  if (linear_) {
    const double t = (x - x_[lo]) / h;
    return y_[lo] + t * (y_[hi] - y_[lo]);
  }
  const double a = (x_[hi] - x) / h;
  const double b = (x - x_[lo]) / h;
  return a * y_[lo] + b * y_[hi] +
         ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) *
             (h * h) / 6.0;
}

}  // namespace beamtrack
