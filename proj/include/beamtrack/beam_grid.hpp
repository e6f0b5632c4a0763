#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace beamtrack {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Rectangular antenna panel: element counts and spacing in wavelengths.
struct ArrayGeometry {
  int m_h = 1;                  // horizontal element count
  int m_v = 1;                  // vertical element count
  double d_h_over_lambda = 0.5; // horizontal spacing / wavelength
  double d_v_over_lambda = 0.5; // vertical spacing / wavelength

  int num_elements() const { return m_h * m_v; }
  void validate() const;
};

/// Evenly spaced azimuth/elevation angles, radians, strictly increasing.
struct AngleGrid {
  std::vector<double> azimuths;
  std::vector<double> elevations;

  int num_azimuth() const { return static_cast<int>(azimuths.size()); }
  int num_elevation() const { return static_cast<int>(elevations.size()); }
  void validate() const;

  // Convenience constructor from a degree-valued start/step/count spec
  // plus an explicit elevation list in degrees (the config-file form).
  static AngleGrid from_degrees(double az_start_deg, double az_step_deg,
                                int az_count,
                                const std::vector<double>& elevations_deg);
};

/// Index pair (h, v) into the angle grid, 0-based.
struct BeamIndex {
  int h = 0;
  int v = 0;
  friend bool operator==(const BeamIndex&, const BeamIndex&) = default;
};

/// Weighted Euclidean metric on beam index pairs: sqrt(dh^2/l_H + dv^2/l_V).
struct BeamIndexMetric {
  double ell_h = 1.0;
  double ell_v = 1.0;

  double operator()(const BeamIndex& a, const BeamIndex& b) const {
    const double dh = a.h - b.h;
    const double dv = a.v - b.v;
    return std::sqrt(dh * dh / ell_h + dv * dv / ell_v);
  }
};

// DFT steering vector for one (azimuth, elevation) direction.
// Horizontal phase term: -2*pi*(d_H/lambda)*k*sin(el)*cos(az), k = 0..M_H-1,
// scaled 1/sqrt(M_H); vertical: -2*pi*(d_V/lambda)*k*cos(el), scaled
// 1/sqrt(M_V). Flattened horizontal-major (entry p*M_V + q = a_h[p]*a_v[q]).
// Note the trig convention (sin(el)*cos(az) horizontal, cos(el) vertical)
// follows the codebook definition used here, not the 3GPP local-coordinate
// one.
CVector make_dft_beam(const ArrayGeometry& geometry, double azimuth,
                      double elevation);

/// The full DFT dictionary over an azimuth x elevation grid.
/// Immutable after construction; safe to share across threads.
class BeamGrid {
 public:
  BeamGrid(ArrayGeometry geometry, AngleGrid angles);

  const ArrayGeometry& geometry() const { return geometry_; }
  const AngleGrid& angles() const { return angles_; }

  int num_beams() const { return static_cast<int>(beams_.size()); }
  int num_azimuth() const { return angles_.num_azimuth(); }
  int num_elevation() const { return angles_.num_elevation(); }

  // Flat ordering is row-major over (v, h): flat = v*H + h.
  int flat_index(const BeamIndex& idx) const {
    return idx.v * num_azimuth() + idx.h;
  }
  BeamIndex pair_index(int flat) const {
    return {flat % num_azimuth(), flat / num_azimuth()};
  }

  const CVector& beam(int flat) const { return beams_[flat]; }
  const CVector& beam(const BeamIndex& idx) const {
    return beams_[flat_index(idx)];
  }

  double azimuth_of(int flat) const {
    return angles_.azimuths[pair_index(flat).h];
  }
  double elevation_of(int flat) const {
    return angles_.elevations[pair_index(flat).v];
  }

  // Default metric weights: l_H/l_V = (azimuth spacing / elevation spacing)^2
  // normalized to l_V = 1. Starting point only; both are refined by the
  // hyperparameter fit.
  BeamIndexMetric default_metric() const;

 private:
  ArrayGeometry geometry_;
  AngleGrid angles_;
  std::vector<CVector> beams_;
};

inline double beam_distance(const BeamIndexMetric& metric, const BeamIndex& a,
                            const BeamIndex& b) {
  return metric(a, b);
}

}  // namespace beamtrack
