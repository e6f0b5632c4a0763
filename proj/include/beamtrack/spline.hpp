#pragma once

#include <vector>

namespace beamtrack {

/// Natural cubic spline through (x, y) knots with strictly increasing x.
/// Degrades to linear interpolation below 4 knots (and to a constant for a
/// single knot). Evaluation outside the knot range extrapolates the end
/// segment.
class CubicSpline1D {
 public:
  CubicSpline1D(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> second_;  // second derivatives at knots (cubic case)
  bool linear_ = false;
};

}  // namespace beamtrack
