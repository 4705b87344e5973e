#include "corrsense/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "corrsense/error.hpp"

namespace corrsense {

namespace {

constexpr double kExpLimit = 700.0;

// sinh(x) - x without cancellation for small x.
double sinh_minus_x(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  }
  return std::sinh(x) - x;
}

void require_jz(const SpinMoments& m) {
  if (!(m.jz_mean != 0.0) || !std::isfinite(m.jz_mean)) {
    throw ValidationError("jz_mean must be finite and nonzero");
  }
}

void guard_exponent(double x, const char* what) {
  if (!(std::abs(x) <= kExpLimit)) {
    throw NumericalError(std::string("deep-dephasing overflow: ") + what + " = " + std::to_string(x) +
                         " exceeds " + std::to_string(kExpLimit));
  }
}

// Spatial factors (weight, c) such that the phase-pair sum for a shot
// separation dl is sum_j weight_j f(Q(dl) c_j).
struct SpatialFactors {
  std::vector<double> weight;
  std::vector<double> c;
  double linear = 0.0;  // sum_j weight_j c_j
  double cubic = 0.0;   // sum_j weight_j c_j^3
  double max_abs = 0.0;

  void add(double w, double v) {
    if (v == 0.0 || w == 0.0) return;
    weight.push_back(w);
    c.push_back(v);
    linear += w * v;
    cubic += w * v * v * v;
    max_abs = std::max(max_abs, std::abs(v));
  }
};

SpatialFactors qubit_pair_factors(const NoiseKernel& k) {
  SpatialFactors f;
  f.add(k.n_qubits(), k.p0());
  for (int d = 1; d < k.n_qubits(); ++d) f.add(k.pair_weight(d), k.p(d));
  return f;
}

// Upper bound on |Q(dl)| for dl >= 2 from |R(t)| <= (2 A sigma / pi) / (1 + sigma^2 t^2).
double q_bound(const TemporalSpectrum& s, double tau, double dl) {
  const double u = s.sigma * (dl - 1.0) * tau;
  return tau * tau * 2.0 * s.strength * s.sigma / std::numbers::pi / (1.0 + u * u);
}

// Bound on sum_{d >= dl} 2 (L - d) |sinh(x_d) - x_d| given |x_d| <= 1.
double remainder_tail(const TemporalSpectrum& s, double tau, double dl, double shots, double cmax) {
  const double c = s.sigma * tau;
  const double a = dl - 1.0;
  const double peak = q_bound(s, tau, dl) * cmax;
  if (peak > 1.0) return std::numeric_limits<double>::infinity();
  const double scale = std::pow(2.0 * s.strength * s.sigma * tau * tau / std::numbers::pi * cmax, 3);
  const double head = std::pow(1.0 / (1.0 + c * c * a * a), 3);
  const double integral = a > 0.0 ? std::min(3.0 * std::numbers::pi / (16.0 * c), 1.0 / (5.0 * std::pow(c, 6) * std::pow(a, 5)))
                                  : 3.0 * std::numbers::pi / (16.0 * c);
  return 2.0 * shots * 1.1 / 6.0 * scale * (head + integral);
}

// sum_{l != l'} sum_j weight_j sinh(Q(l - l') c_j). The part linear in Q is
// summed in closed form via sum_{l,l'} Q = gamma(L tau); the remainder
// sinh(x) - x is summed until its tail bound is negligible against `scale`.
double cross_shot_sum(const NoiseKernel& kernel, const ProtocolParams& p, const SpatialFactors& f,
                      double scale) {
  const TemporalSpectrum& s = kernel.model().temporal;
  const double gt = kernel.gamma_t(p.tau);
  const double linear = f.linear * (kernel.gamma_t(p.total_time) - static_cast<double>(p.shots) * gt);
  if (s.kind == SpectrumKind::White || s.strength == 0.0 || f.c.empty()) return linear;

  const double shots = static_cast<double>(p.shots);
  const double tol = 1e-13 * (scale + std::abs(linear));
  double rem = 0.0;
  for (std::int64_t dl = 1; dl < p.shots; ++dl) {
    if (dl >= 2 && remainder_tail(s, p.tau, static_cast<double>(dl), shots, f.max_abs) < tol) break;
    const double q = kernel.q(p.tau, static_cast<int>(std::min<std::int64_t>(dl, INT32_MAX)));
    const double xmax = std::abs(q) * f.max_abs;
    guard_exponent(xmax, "max |Q P|");
    double term = 0.0;
    if (xmax < 1e-6) {
      term = q * q * q * f.cubic / 6.0;
    } else {
      for (std::size_t j = 0; j < f.c.size(); ++j) term += f.weight[j] * sinh_minus_x(q * f.c[j]);
    }
    rem += 2.0 * (shots - static_cast<double>(dl)) * term;
  }
  return linear + rem;
}

void finish(UncertaintyBreakdown& b, const NoiseModel& model, const ProtocolParams& p) {
  b.total_variance = b.shot_noise + b.single_shot_dephasing + b.cross_shot + b.cross_qubit;
  if (!std::isfinite(b.total_variance)) throw NumericalError("variance is not finite");
  b.total_stddev = std::sqrt(std::max(b.total_variance, 0.0));
  b.fundamental_bound = zero_freq_bound(model, p.n_qubits, p.total_time);
}

NoiseKernel temporal_kernel(const TemporalSpectrum& temporal, int n) {
  return NoiseKernel(NoiseModel{temporal, SpatialSpectrum::uncorrelated()}, n);
}

}  // namespace

ProtocolParams ProtocolParams::make(int n_qubits, double total_time, double tau, double theta) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and > 0");
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw ValidationError("total_time must be finite and > 0");
  }
  const double ratio = std::round(total_time / tau);
  if (ratio > 1e12) throw ValidationError("T / tau exceeds 1e12 shots");
  ProtocolParams p;
  p.n_qubits = n_qubits;
  p.total_time = total_time;
  p.shots = std::max<std::int64_t>(1, static_cast<std::int64_t>(ratio));
  p.tau = total_time / static_cast<double>(p.shots);
  p.theta = theta;
  p.validate();
  return p;
}

void ProtocolParams::validate() const {
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1, got " + std::to_string(n_qubits));
  if (!(total_time > 0.0) || !std::isfinite(total_time)) throw ValidationError("total_time must be finite and > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and > 0");
  if (shots < 1) throw ValidationError("shots must be >= 1");
  if (std::abs(static_cast<double>(shots) * tau - total_time) > 1e-9 * tau * static_cast<double>(shots)) {
    throw ValidationError("shots * tau must equal total_time");
  }
  if (!std::isfinite(theta)) throw ValidationError("theta must be finite");
}

const char* formula_name(FormulaTag tag) {
  switch (tag) {
    case FormulaTag::Full: return "full";
    case FormulaTag::TemporalOnly: return "temporal";
    case FormulaTag::Simplified: return "simplified";
    case FormulaTag::SpatialApprox: return "spatial-approx";
    case FormulaTag::NoNoise: return "no-noise";
    case FormulaTag::Markovian: return "markovian";
    case FormulaTag::GhzExact: return "ghz-exact";
    case FormulaTag::GhzSimple: return "ghz-simple";
  }
  return "unknown";
}

FormulaTag parse_formula(std::string_view name) {
  for (auto t : {FormulaTag::Full, FormulaTag::TemporalOnly, FormulaTag::Simplified, FormulaTag::SpatialApprox,
                 FormulaTag::NoNoise, FormulaTag::Markovian, FormulaTag::GhzExact, FormulaTag::GhzSimple}) {
    if (name == formula_name(t)) return t;
  }
  throw ValidationError("unknown formula '" + std::string(name) + "'");
}

bool is_ghz(FormulaTag tag) { return tag == FormulaTag::GhzExact || tag == FormulaTag::GhzSimple; }

UncertaintyBreakdown variance_full(const SpinMoments& m, const NoiseKernel& kernel, const ProtocolParams& p) {
  p.validate();
  require_jz(m);
  if (kernel.n_qubits() != p.n_qubits) throw ValidationError("noise kernel was built for a different N");
  const double n = p.n_qubits;
  const double shots = static_cast<double>(p.shots);
  const double gt = kernel.gamma_t(p.tau);
  const double g = gt * kernel.p0();
  guard_exponent(g, "gamma(tau)");

  const double d = std::pow(p.total_time * m.jz_mean, 2);
  UncertaintyBreakdown b;
  b.formula = FormulaTag::Full;
  b.shot_noise = shots * m.jy2_mean / d;
  b.single_shot_dephasing = n * shots * std::expm1(g) / 4.0 / d;

  // Cross-shot numerator carries <J_z>^2 / N^2, so it reduces to 1 / (N T)^2.
  const double nt2 = std::pow(n * p.total_time, 2);
  const double scale = (b.shot_noise + b.single_shot_dephasing) * nt2;
  b.cross_shot = cross_shot_sum(kernel, p, qubit_pair_factors(kernel), scale) / nt2;

  if (p.n_qubits > 1) {
    double s_sinh = 0.0, s_cosh = 0.0, s_exp = 0.0;
    for (int dn = 1; dn < p.n_qubits; ++dn) {
      const double c = gt * kernel.p(dn);
      if (c == 0.0) continue;
      guard_exponent(c, "gamma P(dn)");
      const double w = kernel.pair_weight(dn);
      s_sinh += w * std::sinh(c);
      s_cosh += w * 2.0 * std::pow(std::sinh(0.5 * c), 2);  // cosh(c) - 1
      s_exp += w * std::expm1(c);
    }
    b.cross_qubit = (shots / (n * (n - 1.0)) * (m.jz2_mean * s_sinh + m.jy2_mean * s_cosh) -
                     shots / (4.0 * (n - 1.0)) * s_exp) /
                    d;
  }
  finish(b, kernel.model(), p);
  return b;
}

UncertaintyBreakdown variance_full(const SpinMoments& m, const NoiseModel& model, const ProtocolParams& p) {
  return variance_full(m, NoiseKernel(model, p.n_qubits), p);
}

UncertaintyBreakdown variance_temp_unc(const SpinMoments& m, const TemporalSpectrum& temporal,
                                       const ProtocolParams& p) {
  UncertaintyBreakdown b = variance_full(m, temporal_kernel(temporal, p.n_qubits), p);
  b.formula = FormulaTag::TemporalOnly;
  return b;
}

UncertaintyBreakdown variance_simplified(const SpinMoments& m, const TemporalSpectrum& temporal,
                                         const ProtocolParams& p) {
  p.validate();
  require_jz(m);
  temporal.validate();
  const double n = p.n_qubits, t = p.total_time, tau = p.tau;
  const double g = gamma(temporal, tau);
  guard_exponent(g, "gamma(tau)");
  const double jz2 = m.jz_mean * m.jz_mean;
  UncertaintyBreakdown b;
  b.formula = FormulaTag::Simplified;
  b.shot_noise = m.jy2_mean / (tau * t * jz2);
  b.single_shot_dephasing = n * std::expm1(g) / (4.0 * tau * t * jz2);
  b.cross_shot = (gamma(temporal, t) / t - g / tau) / (n * t);
  finish(b, NoiseModel{temporal, SpatialSpectrum::uncorrelated()}, p);
  return b;
}

UncertaintyBreakdown variance_spatial_approx(const SpinMoments& m, const NoiseKernel& kernel,
                                             const ProtocolParams& p) {
  p.validate();
  require_jz(m);
  const double n = p.n_qubits, t = p.total_time, tau = p.tau;
  const double p0 = kernel.p0(), g0 = kernel.g0();
  const double g = kernel.gamma_t(tau) * p0;
  guard_exponent(g, "gamma(tau)");
  const double jz2 = m.jz_mean * m.jz_mean;
  UncertaintyBreakdown b;
  b.formula = FormulaTag::SpatialApprox;
  b.shot_noise = m.jy2_mean / (tau * t * jz2);
  b.single_shot_dephasing = n * std::expm1(g) / (4.0 * tau * t * jz2);
  b.cross_shot = (g0 * kernel.gamma_t(t) / t - g / tau) / (n * t);
  if (p0 != 0.0) {
    b.cross_qubit = g / (n * tau * t) * (m.jz_var / jz2) * (g0 / p0 - 1.0);
  }
  finish(b, kernel.model(), p);
  return b;
}

UncertaintyBreakdown variance_no_noise(const SpinMoments& m, const ProtocolParams& p) {
  p.validate();
  require_jz(m);
  UncertaintyBreakdown b;
  b.formula = FormulaTag::NoNoise;
  b.shot_noise = m.jy2_mean / (p.tau * p.total_time * m.jz_mean * m.jz_mean);
  b.total_variance = b.shot_noise;
  b.total_stddev = std::sqrt(b.total_variance);
  return b;
}

UncertaintyBreakdown variance_markovian(const SpinMoments& m, const TemporalSpectrum& temporal,
                                        const ProtocolParams& p) {
  p.validate();
  require_jz(m);
  temporal.validate();
  if (temporal.kind != SpectrumKind::White) {
    throw ValidationError("the markovian formula requires white temporal noise");
  }
  const double g = temporal.strength * p.tau;
  guard_exponent(g, "gamma(tau)");
  const double denom = p.tau * p.total_time * m.jz_mean * m.jz_mean;
  UncertaintyBreakdown b;
  b.formula = FormulaTag::Markovian;
  b.shot_noise = m.jy2_mean / denom;
  b.single_shot_dephasing = p.n_qubits * std::expm1(g) / (4.0 * denom);
  finish(b, NoiseModel{temporal, SpatialSpectrum::uncorrelated()}, p);
  return b;
}

UncertaintyBreakdown variance_ghz(const NoiseKernel& kernel, const ProtocolParams& p, GhzMode mode) {
  p.validate();
  if (kernel.n_qubits() != p.n_qubits) throw ValidationError("noise kernel was built for a different N");
  const double shots = static_cast<double>(p.shots);
  const double psum = kernel.p_sum();
  const double v = kernel.gamma_t(p.tau) * psum;
  guard_exponent(v, "N gamma(tau)");
  const double nt2 = std::pow(p.n_qubits * p.total_time, 2);

  UncertaintyBreakdown b;
  b.formula = mode == GhzMode::Exact ? FormulaTag::GhzExact : FormulaTag::GhzSimple;
  b.shot_noise = shots / nt2;
  b.single_shot_dephasing = shots * std::expm1(v) / nt2;
  const double linear = psum * (kernel.gamma_t(p.total_time) - shots * kernel.gamma_t(p.tau));
  if (mode == GhzMode::Simple) {
    b.cross_shot = linear / nt2;
  } else {
    SpatialFactors f;
    f.add(1.0, psum);
    b.cross_shot = cross_shot_sum(kernel, p, f, shots * std::exp(v)) / nt2;
  }
  finish(b, kernel.model(), p);
  return b;
}

UncertaintyBreakdown variance_ghz(const TemporalSpectrum& temporal, const ProtocolParams& p, GhzMode mode) {
  return variance_ghz(temporal_kernel(temporal, p.n_qubits), p, mode);
}

UncertaintyBreakdown evaluate(FormulaTag tag, const SpinMoments& m, const NoiseKernel& kernel,
                              const ProtocolParams& p) {
  switch (tag) {
    case FormulaTag::Full: return variance_full(m, kernel, p);
    case FormulaTag::TemporalOnly: return variance_temp_unc(m, kernel.model().temporal, p);
    case FormulaTag::Simplified: return variance_simplified(m, kernel.model().temporal, p);
    case FormulaTag::SpatialApprox: return variance_spatial_approx(m, kernel, p);
    case FormulaTag::NoNoise: return variance_no_noise(m, p);
    case FormulaTag::Markovian: return variance_markovian(m, kernel.model().temporal, p);
    case FormulaTag::GhzExact: return variance_ghz(kernel, p, GhzMode::Exact);
    case FormulaTag::GhzSimple: return variance_ghz(kernel, p, GhzMode::Simple);
  }
  throw ValidationError("unknown formula tag");
}

double calibrated_slope(const SpinMoments& m, const NoiseKernel& kernel, const ProtocolParams& p) {
  return p.tau * std::exp(-0.5 * kernel.gamma_t(p.tau) * kernel.p0()) * m.jz_mean;
}

double calibrated_slope(const SpinMoments& m, const TemporalSpectrum& temporal, const ProtocolParams& p) {
  return p.tau * std::exp(-0.5 * gamma(temporal, p.tau)) * m.jz_mean;
}

double ghz_slope(const NoiseKernel& kernel, const ProtocolParams& p) {
  return p.n_qubits * p.tau * std::exp(-0.5 * kernel.gamma_t(p.tau) * kernel.p_sum());
}

}  // namespace corrsense
