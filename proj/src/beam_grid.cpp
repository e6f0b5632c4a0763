#include "beamtrack/beam_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamtrack {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
}  // namespace

void ArrayGeometry::validate() const {
  if (m_h < 1 || m_v < 1) {
    throw std::invalid_argument("ArrayGeometry: antenna counts must be >= 1");
  }
  if (d_h_over_lambda <= 0.0 || d_v_over_lambda <= 0.0) {
    throw std::invalid_argument("ArrayGeometry: spacings must be positive");
  }
}

void AngleGrid::validate() const {
  if (azimuths.empty() || elevations.empty()) {
    throw std::invalid_argument("AngleGrid: angle lists must be non-empty");
  }
  auto check_even = [](const std::vector<double>& xs, const char* what) {
    if (xs.size() < 2) return;
    const double step = xs[1] - xs[0];
    if (step <= 0.0) {
      throw std::invalid_argument(std::string("AngleGrid: ") + what +
                                  " must be strictly increasing");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double d = xs[i] - xs[i - 1];
      if (d <= 0.0 || std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step))) {
        throw std::invalid_argument(std::string("AngleGrid: ") + what +
                                    " must be evenly spaced");
      }
    }
  };
  check_even(azimuths, "azimuths");
  check_even(elevations, "elevations");
}

AngleGrid AngleGrid::from_degrees(double az_start_deg, double az_step_deg,
                                  int az_count,
                                  const std::vector<double>& elevations_deg) {
  AngleGrid grid;
  grid.azimuths.reserve(az_count);
  for (int n = 0; n < az_count; ++n) {
    grid.azimuths.push_back((az_start_deg + az_step_deg * n) * kDegToRad);
  }
  grid.elevations.reserve(elevations_deg.size());
  for (double e : elevations_deg) grid.elevations.push_back(e * kDegToRad);
  grid.validate();
  return grid;
}

CVector make_dft_beam(const ArrayGeometry& geometry, double azimuth,
                      double elevation) {
  geometry.validate();
  const int mh = geometry.m_h;
  const int mv = geometry.m_v;

  const double horiz_phase =
      -kTwoPi * geometry.d_h_over_lambda * std::sin(elevation) * std::cos(azimuth);
  const double vert_phase = -kTwoPi * geometry.d_v_over_lambda * std::cos(elevation);

  CVector horiz(mh);
  for (int k = 0; k < mh; ++k) {
    horiz(k) = std::polar(1.0 / std::sqrt(double(mh)), horiz_phase * k);
  }
  CVector vert(mv);
  for (int k = 0; k < mv; ++k) {
    vert(k) = std::polar(1.0 / std::sqrt(double(mv)), vert_phase * k);
  }

  // horizontal-major flattening of horiz (x) vert
  CVector beam(mh * mv);
  for (int p = 0; p < mh; ++p) {
    for (int q = 0; q < mv; ++q) {
      beam(p * mv + q) = horiz(p) * vert(q);
    }
  }
  return beam;
}

BeamGrid::BeamGrid(ArrayGeometry geometry, AngleGrid angles)
    : geometry_(std::move(geometry)), angles_(std::move(angles)) {
  geometry_.validate();
  angles_.validate();
  const int h_count = angles_.num_azimuth();
  const int v_count = angles_.num_elevation();
  beams_.reserve(static_cast<std::size_t>(h_count) * v_count);
  for (int v = 0; v < v_count; ++v) {
    for (int h = 0; h < h_count; ++h) {
      beams_.push_back(
          make_dft_beam(geometry_, angles_.azimuths[h], angles_.elevations[v]));
    }
  }
}

BeamIndexMetric BeamGrid::default_metric() const {
  double az_step = angles_.azimuths.size() > 1
                       ? angles_.azimuths[1] - angles_.azimuths[0]
                       : 1.0;
  double el_step = angles_.elevations.size() > 1
                       ? angles_.elevations[1] - angles_.elevations[0]
                       : az_step;
  const double ratio = az_step / el_step;
  return BeamIndexMetric{ratio * ratio, 1.0};
}

}  // namespace beamtrack
