#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "corrsense/dicke_spin.hpp"

namespace corrsense::detail {

// <k+1| J_+ |k> for spin N/2 with m = k - N/2.
inline double ladder(int n_qubits, std::size_t k) {
  const double kk = static_cast<double>(k);
  return std::sqrt((n_qubits - kk) * (kk + 1.0));
}

inline double quadratic_form(const Mat3& m, const Vec3& v) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += v[a] * m[a][b] * v[b];
  return s;
}

// Right-handed frame with z along the mean spin and y along the
// minimum-variance direction orthogonal to it.
struct AlignedFrame {
  double mean_length = 0.0;
  double min_variance = 0.0;
  Vec3 x_axis{1.0, 0.0, 0.0};
  Vec3 y_axis{0.0, 1.0, 0.0};
  Vec3 z_axis{0.0, 0.0, 1.0};
};

AlignedFrame align_frame(const LabMoments& lab);

// Axis and angle of the proper rotation matrix r (active convention).
void axis_angle(const Mat3& r, Vec3& axis, double& angle);

// Two-axis twisting from the +z coherent state, returned as real amplitudes.
std::vector<double> tat_evolve(int n_qubits, double chi_t, const TwistingOptions& options);

SpinMoments tat_moments(int n_qubits, double chi_t, const TwistingOptions& options);

}  // namespace corrsense::detail
