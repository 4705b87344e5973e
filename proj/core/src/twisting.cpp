#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "corrsense/dicke_spin.hpp"
#include "corrsense/error.hpp"
#include "spin_algebra.hpp"

namespace corrsense {
namespace detail {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(dot(v, v));
  for (auto& x : v) x /= n;
  return v;
}

double bilinear(const Mat3& m, const Vec3& u, const Vec3& v) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += u[a] * m[a][b] * v[b];
  return s;
}

// Coefficients of (J_+^2 - J_-^2) / 2: a_k = <k+2| J_+^2 |k>.
std::vector<double> tat_couplings(int n) {
  std::vector<double> a(static_cast<std::size_t>(std::max(n - 1, 0)));
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = ladder(n, k) * ladder(n, k + 1);
  return a;
}

// d psi / d(chi t) = -i H psi, which is real for this generator.
void tat_rhs(const std::vector<double>& a, const std::vector<double>& psi, std::vector<double>& out) {
  const std::size_t dim = psi.size();
  for (std::size_t k = 0; k < dim; ++k) {
    double v = 0.0;
    if (k >= 2) v -= 0.5 * a[k - 2] * psi[k - 2];
    if (k + 2 < dim) v += 0.5 * a[k] * psi[k + 2];
    out[k] = v;
  }
}

class TatStepper {
 public:
  TatStepper(int n, double h) : a_(tat_couplings(n)), h_(h) {
    const std::size_t dim = static_cast<std::size_t>(n) + 1;
    k1_.resize(dim);
    k2_.resize(dim);
    k3_.resize(dim);
    k4_.resize(dim);
    tmp_.resize(dim);
  }

  void step(std::vector<double>& psi) {
    const std::size_t dim = psi.size();
    tat_rhs(a_, psi, k1_);
    for (std::size_t i = 0; i < dim; ++i) tmp_[i] = psi[i] + 0.5 * h_ * k1_[i];
    tat_rhs(a_, tmp_, k2_);
    for (std::size_t i = 0; i < dim; ++i) tmp_[i] = psi[i] + 0.5 * h_ * k2_[i];
    tat_rhs(a_, tmp_, k3_);
    for (std::size_t i = 0; i < dim; ++i) tmp_[i] = psi[i] + h_ * k3_[i];
    tat_rhs(a_, tmp_, k4_);
    for (std::size_t i = 0; i < dim; ++i) {
      psi[i] += h_ / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  std::vector<double> a_;
  double h_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

double norm_drift(const std::vector<double>& psi) {
  double s = 0.0;
  for (double x : psi) s += x * x;
  return std::abs(s - 1.0);
}

void check_tat_size(int n, const TwistingOptions& options) {
  if (n < 1) throw ValidationError("n_qubits must be >= 1, got " + std::to_string(n));
  if (n > options.max_tat_qubits) {
    throw ValidationError("two-axis twisting is capped at " + std::to_string(options.max_tat_qubits) +
                          " qubits, got " + std::to_string(n));
  }
}

std::vector<double> coherent_z_real(int n) {
  std::vector<double> psi(static_cast<std::size_t>(n) + 1, 0.0);
  psi.back() = 1.0;
  return psi;
}

CollectiveSpinState as_state(int n, const std::vector<double>& psi) {
  CollectiveSpinState s;
  s.n_qubits = n;
  s.basis = Basis::Z;
  s.amplitudes.assign(psi.begin(), psi.end());
  return s;
}

constexpr int kMaxHalvings = 12;

}  // namespace

AlignedFrame align_frame(const LabMoments& lab) {
  AlignedFrame f;
  const Vec3& v = lab.mean;
  f.mean_length = std::sqrt(dot(v, v));
  if (f.mean_length > 0.0) {
    f.z_axis = normalized(v);
  }
  const Vec3& n = f.z_axis;

  // Seed the orthogonal plane with the lab axis least aligned with n.
  int least = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(n[a]) < std::abs(n[least])) least = a;
  Vec3 seed{};
  seed[least] = 1.0;
  const double proj = dot(seed, n);
  for (int a = 0; a < 3; ++a) seed[a] -= proj * n[a];
  const Vec3 e1 = normalized(seed);
  const Vec3 e2 = cross(n, e1);

  // Covariance restricted to the plane; the mean has no component there.
  const double p = bilinear(lab.second, e1, e1);
  const double q = bilinear(lab.second, e2, e2);
  const double r = bilinear(lab.second, e1, e2);
  const double half_gap = std::hypot(0.5 * (p - q), r);
  f.min_variance = 0.5 * (p + q) - half_gap;

  double u1 = r, u2 = f.min_variance - p;
  const double w1 = f.min_variance - q, w2 = r;
  if (u1 * u1 + u2 * u2 < w1 * w1 + w2 * w2) {
    u1 = w1;
    u2 = w2;
  }
  const double un = std::hypot(u1, u2);
  if (un > 0.0) {
    u1 /= un;
    u2 /= un;
  } else {
    u1 = 0.0;
    u2 = 1.0;
  }
  for (int a = 0; a < 3; ++a) f.y_axis[a] = u1 * e1[a] + u2 * e2[a];
  f.x_axis = cross(f.y_axis, f.z_axis);
  return f;
}

void axis_angle(const Mat3& r, Vec3& axis, double& angle) {
  // Shepperd's quaternion extraction, stable near angle = pi.
  const double tr = r[0][0] + r[1][1] + r[2][2];
  double w, x, y, z;
  if (tr > 0.0) {
    const double s = 2.0 * std::sqrt(tr + 1.0);
    w = 0.25 * s;
    x = (r[2][1] - r[1][2]) / s;
    y = (r[0][2] - r[2][0]) / s;
    z = (r[1][0] - r[0][1]) / s;
  } else if (r[0][0] >= r[1][1] && r[0][0] >= r[2][2]) {
    const double s = 2.0 * std::sqrt(std::max(1.0 + r[0][0] - r[1][1] - r[2][2], 0.0));
    w = (r[2][1] - r[1][2]) / s;
    x = 0.25 * s;
    y = (r[0][1] + r[1][0]) / s;
    z = (r[0][2] + r[2][0]) / s;
  } else if (r[1][1] >= r[2][2]) {
    const double s = 2.0 * std::sqrt(std::max(1.0 + r[1][1] - r[0][0] - r[2][2], 0.0));
    w = (r[0][2] - r[2][0]) / s;
    x = (r[0][1] + r[1][0]) / s;
    y = 0.25 * s;
    z = (r[1][2] + r[2][1]) / s;
  } else {
    const double s = 2.0 * std::sqrt(std::max(1.0 + r[2][2] - r[0][0] - r[1][1], 0.0));
    w = (r[1][0] - r[0][1]) / s;
    x = (r[0][2] + r[2][0]) / s;
    y = (r[1][2] + r[2][1]) / s;
    z = 0.25 * s;
  }
  const double vn = std::sqrt(x * x + y * y + z * z);
  if (vn == 0.0) {
    axis = {0.0, 0.0, 1.0};
    angle = 0.0;
    return;
  }
  axis = {x / vn, y / vn, z / vn};
  angle = 2.0 * std::atan2(vn, w);
}

std::vector<double> tat_evolve(int n, double chi_t, const TwistingOptions& options) {
  check_tat_size(n, options);
  if (chi_t == 0.0) return coherent_z_real(n);
  const double h0 = std::min(1e-3 / n, chi_t / 100.0);
  long steps = static_cast<long>(std::ceil(chi_t / h0));
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, steps *= 2) {
    std::vector<double> psi = coherent_z_real(n);
    TatStepper stepper(n, chi_t / static_cast<double>(steps));
    for (long s = 0; s < steps; ++s) stepper.step(psi);
    if (norm_drift(psi) < options.norm_tolerance) return psi;
  }
  throw NumericalError("two-axis twisting integration did not reach the norm tolerance");
}

SpinMoments tat_moments(int n, double chi_t, const TwistingOptions& options) {
  return aligned_moments(lab_moments(as_state(n, tat_evolve(n, chi_t, options))));
}

}  // namespace detail

SpinMoments oat_moments(int n_qubits, double chi_t) {
  SqueezingFamily::one_axis(chi_t).validate();
  CollectiveSpinState s = make_coherent_x(n_qubits);
  for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
    s.amplitudes[k] *= std::polar(1.0, -chi_t * s.m(k) * s.m(k));
  }
  return aligned_moments(lab_moments(s));
}

CollectiveSpinState make_twisted_state(int n_qubits, const SqueezingFamily& family,
                                       const TwistingOptions& options) {
  family.validate();
  CollectiveSpinState s;
  if (family.kind == FamilyKind::OneAxisTwisted) {
    s = make_coherent_x(n_qubits);
    for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
      s.amplitudes[k] *= std::polar(1.0, -family.parameter * s.m(k) * s.m(k));
    }
  } else if (family.kind == FamilyKind::TwoAxisTwisted) {
    s = detail::as_state(n_qubits, detail::tat_evolve(n_qubits, family.parameter, options));
  } else {
    throw ValidationError("make_twisted_state expects a one- or two-axis twisting family");
  }

  // Rotate so that (x', y', z') of the aligned frame become (x, y, z).
  const detail::AlignedFrame f = detail::align_frame(lab_moments(s));
  Mat3 r{};
  for (int b = 0; b < 3; ++b) {
    r[0][b] = f.x_axis[b];
    r[1][b] = f.y_axis[b];
    r[2][b] = f.z_axis[b];
  }
  Vec3 axis;
  double angle;
  detail::axis_angle(r, axis, angle);
  return rotate(s, axis, angle);
}

std::vector<TwistSample> tat_trajectory(int n_qubits, double max_chi_t, bool stop_past_minimum,
                                        int record_every, const TwistingOptions& options) {
  detail::check_tat_size(n_qubits, options);
  if (!(max_chi_t > 0.0) || !std::isfinite(max_chi_t)) {
    throw ValidationError("max_chi_t must be finite and > 0");
  }
  if (record_every < 1) throw ValidationError("record_every must be >= 1");

  const double h0 = std::min(1e-3 / n_qubits, max_chi_t / 100.0);
  long steps = static_cast<long>(std::ceil(max_chi_t / h0));
  for (int attempt = 0; attempt <= detail::kMaxHalvings; ++attempt, steps *= 2) {
    const double h = max_chi_t / static_cast<double>(steps);
    const int every = record_every << attempt;
    std::vector<double> psi = detail::coherent_z_real(n_qubits);
    detail::TatStepper stepper(n_qubits, h);
    std::vector<TwistSample> out;
    out.push_back({0.0, separable_moments(n_qubits)});
    double best = out.back().moments.squeezing_ratio();
    bool drifted = false;
    for (long s = 1; s <= steps; ++s) {
      stepper.step(psi);
      if (s % every != 0 && s != steps) continue;
      if (detail::norm_drift(psi) >= options.norm_tolerance) {
        drifted = true;
        break;
      }
      const SpinMoments m = aligned_moments(lab_moments(detail::as_state(n_qubits, psi)));
      out.push_back({h * static_cast<double>(s), m});
      const double ratio = m.squeezing_ratio();
      best = std::min(best, ratio);
      if (stop_past_minimum && (ratio > 2.0 * best || m.jz_mean < 1e-6 * n_qubits)) break;
    }
    if (!drifted) return out;
  }
  throw NumericalError("two-axis twisting integration did not reach the norm tolerance");
}

}  // namespace corrsense
