#include "corrsense/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "corrsense/error.hpp"

namespace corrsense {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

// Value of S at infinite frequency; it integrates to an exact delta term.
double asymptote(const TemporalSpectrum& s) {
  return (s.kind == SpectrumKind::White || s.kind == SpectrumKind::Linear) ? s.strength : 0.0;
}

// S(omega) - S(inf) for omega >= 0.
double residual(const TemporalSpectrum& s, double omega) {
  const double a = s.strength;
  switch (s.kind) {
    case SpectrumKind::White: return 0.0;
    case SpectrumKind::Gaussian: return a * std::exp(-0.5 * omega * omega / (s.sigma * s.sigma));
    case SpectrumKind::Linear: return -a * std::exp(-omega / s.sigma);
    case SpectrumKind::Ohmic: return a * (omega / s.sigma) * std::exp(-omega / s.sigma);
  }
  return 0.0;
}

// int_w^inf |S - S(inf)| d omega.
double residual_tail(const TemporalSpectrum& s, double w) {
  const double a = s.strength, sg = s.sigma;
  switch (s.kind) {
    case SpectrumKind::White: return 0.0;
    case SpectrumKind::Gaussian:
      return a * sg * std::sqrt(0.5 * kPi) * std::erfc(w / (sg * std::numbers::sqrt2));
    case SpectrumKind::Linear: return a * sg * std::exp(-w / sg);
    case SpectrumKind::Ohmic: return a * sg * (1.0 + w / sg) * std::exp(-w / sg);
  }
  return 0.0;
}

double sinc(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

// Shape of the spectrum at x = |frequency| / width, unit strength.
double unit_shape(SpectrumKind kind, double x) {
  switch (kind) {
    case SpectrumKind::White: return 1.0;
    case SpectrumKind::Gaussian: return std::exp(-0.5 * x * x);
    case SpectrumKind::Linear: return -std::expm1(-x);
    case SpectrumKind::Ohmic: return x * std::exp(-x);
  }
  return 0.0;
}

}  // namespace

const char* kind_name(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::White: return "white";
    case SpectrumKind::Gaussian: return "gaussian";
    case SpectrumKind::Linear: return "linear";
    case SpectrumKind::Ohmic: return "ohmic";
  }
  return "unknown";
}

SpectrumKind parse_kind(std::string_view name) {
  if (name == "white") return SpectrumKind::White;
  if (name == "gaussian") return SpectrumKind::Gaussian;
  if (name == "linear") return SpectrumKind::Linear;
  if (name == "ohmic") return SpectrumKind::Ohmic;
  throw ValidationError("unknown spectrum kind '" + std::string(name) +
                        "' (expected white, gaussian, linear or ohmic)");
}

void TemporalSpectrum::validate() const {
  if (!finite_nonneg(strength)) {
    throw ValidationError("temporal strength A must be finite and >= 0, got " + std::to_string(strength));
  }
  if (kind != SpectrumKind::White && !finite_pos(sigma)) {
    throw ValidationError("temporal sigma must be finite and > 0, got " + std::to_string(sigma));
  }
}

void SpatialSpectrum::validate() const {
  if (!finite_nonneg(strength)) {
    throw ValidationError("spatial strength B must be finite and >= 0, got " + std::to_string(strength));
  }
  if (kind != SpectrumKind::White && !finite_pos(k0)) {
    throw ValidationError("spatial k0 must be finite and > 0, got " + std::to_string(k0));
  }
}

double spectrum_value(const TemporalSpectrum& spec, double omega) {
  const double x = spec.kind == SpectrumKind::White ? 0.0 : std::abs(omega) / spec.sigma;
  return spec.strength * unit_shape(spec.kind, x);
}

double spatial_spectrum_value(const SpatialSpectrum& spec, double k) {
  const double x = spec.kind == SpectrumKind::White ? 0.0 : std::abs(k) / spec.k0;
  return spec.strength * unit_shape(spec.kind, x);
}

double gamma(const TemporalSpectrum& spec, double tau) {
  if (!(tau >= 0.0)) throw ValidationError("tau must be >= 0, got " + std::to_string(tau));
  if (tau == 0.0 || spec.strength == 0.0) return 0.0;
  const double a = spec.strength;
  const double x = spec.sigma * tau;
  switch (spec.kind) {
    case SpectrumKind::White: return a * tau;
    case SpectrumKind::Gaussian:
      return a * tau *
             (std::sqrt(2.0 / kPi) * std::expm1(-0.5 * x * x) / x + std::erf(x / std::numbers::sqrt2));
    case SpectrumKind::Linear:
      return a * tau * (2.0 / kPi * std::atan(1.0 / x) + std::log1p(x * x) / (kPi * x));
    case SpectrumKind::Ohmic: return a / (kPi * spec.sigma) * std::log1p(x * x);
  }
  return 0.0;
}

Autocorrelation autocorrelation(const TemporalSpectrum& spec, double t) {
  const double a = spec.strength, s = spec.sigma;
  const double u2 = s * s * t * t;
  switch (spec.kind) {
    case SpectrumKind::White: return {0.0, a};
    case SpectrumKind::Gaussian: return {a * s / std::sqrt(2.0 * kPi) * std::exp(-0.5 * u2), 0.0};
    case SpectrumKind::Linear: return {-a * s / kPi / (1.0 + u2), a};
    case SpectrumKind::Ohmic: return {a * s / kPi * (1.0 - u2) / ((1.0 + u2) * (1.0 + u2)), 0.0};
  }
  return {};
}

QuadratureResult shot_correlation_quadrature(const TemporalSpectrum& spec, double tau, int delta_l) {
  spec.validate();
  if (!finite_pos(tau)) throw ValidationError("tau must be finite and > 0");
  if (delta_l < 0) throw ValidationError("delta_l must be >= 0");

  QuadratureResult out;
  const double delta_part = delta_l == 0 ? asymptote(spec) * tau : 0.0;
  if (spec.kind == SpectrumKind::White || spec.strength == 0.0) {
    out.value = delta_part;
    return out;
  }

  const double dl = delta_l;
  auto f = [&](double w) {
    const double s = sinc(0.5 * tau * w);
    return tau * tau / kPi * residual(spec, w) * s * s * std::cos(tau * w * dl);
  };

  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double width = std::min(2.0 * kPi / (tau * (dl + 1.0)), spec.sigma);
  constexpr int kMaxPanels = 4'000'000;
  double acc = 0.0, l1 = 0.0, err = 0.0, tail = 0.0;
  double lo = 0.0;
  for (int i = 0; i < kMaxPanels; ++i) {
    const double hi = lo + width;
    double e = 0.0, pl1 = 0.0;
    acc += GK::integrate(f, lo, hi, 8, 1e-14, &e, &pl1);
    err += e;
    l1 += pl1;
    lo = hi;
    ++out.panels;
    // |integrand| <= 4 |S - S(inf)| / (pi omega^2) beyond lo.
    tail = 4.0 / (kPi * lo * lo) * residual_tail(spec, lo);
    if (tail < 1e-10 * l1) break;
  }
  out.value = acc + delta_part;
  out.error_estimate = err + tail;
  if (out.error_estimate > 1e-8 * (l1 + std::abs(delta_part))) {
    throw NumericalError("shot-correlation quadrature did not converge for " +
                         std::string(kind_name(spec.kind)) + " noise (tau = " + std::to_string(tau) +
                         ", delta_l = " + std::to_string(delta_l) + ")");
  }
  return out;
}

double shot_correlation(const TemporalSpectrum& spec, double tau, int delta_l) {
  return shot_correlation_quadrature(spec, tau, delta_l).value;
}

double shot_correlation_fast(const TemporalSpectrum& spec, double tau, int delta_l) {
  if (delta_l < 0) delta_l = -delta_l;
  if (delta_l == 0) return gamma(spec, tau);
  if (spec.kind == SpectrumKind::White) return 0.0;
  const double d = delta_l;
  return 0.5 * (gamma(spec, (d + 1.0) * tau) - 2.0 * gamma(spec, d * tau) + gamma(spec, (d - 1.0) * tau));
}

double spatial_corr(const SpatialSpectrum& spec, int delta_n) {
  spec.validate();
  const int d = std::abs(delta_n);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [&](double k) { return spatial_spectrum_value(spec, k) * std::cos(k * d); };
  const int panels = std::max(1, d);
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    acc += GK::integrate(f, kPi * i / panels, kPi * (i + 1) / panels, 15, 1e-14);
  }
  return acc / kPi;
}

std::vector<double> spatial_corr_table(const SpatialSpectrum& spec, int max_delta) {
  spec.validate();
  if (max_delta < 0) throw ValidationError("max_delta must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(max_delta) + 1, 0.0);
  const double b = spec.strength;
  const double a = 1.0 / spec.k0;
  const double decay = std::exp(-a * kPi);

  switch (spec.kind) {
    case SpectrumKind::White:
      p[0] = b;
      break;
    case SpectrumKind::Linear:
      // B delta - (B / pi) int_0^pi exp(-a k) cos(k d) dk
      for (int d = 0; d <= max_delta; ++d) {
        const double s = (d % 2 == 0) ? 1.0 : -1.0;
        const double den = a * a + static_cast<double>(d) * d;
        p[d] = (d == 0 ? b : 0.0) - b / kPi * a * (1.0 - s * decay) / den;
      }
      break;
    case SpectrumKind::Ohmic:
      // (B a / pi) int_0^pi k exp(-a k) cos(k d) dk
      for (int d = 0; d <= max_delta; ++d) {
        const double s = (d % 2 == 0) ? 1.0 : -1.0;
        const double den = a * a + static_cast<double>(d) * d;
        const double num = 1.0 - s * decay;
        p[d] = b * a / kPi * (2.0 * a * a * num / (den * den) - (num + a * kPi * s * decay) / den);
      }
      break;
    case SpectrumKind::Gaussian: {
      using GL = boost::math::quadrature::gauss<double, 8>;
      const auto& x = GL::abscissa();
      const auto& w = GL::weights();
      const int panels = std::max(8, max_delta);
      const double half = 0.5 * kPi / panels;
      for (int i = 0; i < panels; ++i) {
        const double mid = (2 * i + 1) * half;
        for (std::size_t j = 0; j < x.size(); ++j) {
          for (double sign : {-1.0, 1.0}) {
            const double k = mid + sign * half * x[j];
            const double wk = half * w[j] * spatial_spectrum_value(spec, k);
            // cos(k d) by the Chebyshev recurrence.
            const double c1 = std::cos(k);
            double prev = 1.0, cur = c1;
            p[0] += wk;
            for (int d = 1; d <= max_delta; ++d) {
              p[d] += wk * cur;
              const double next = 2.0 * c1 * cur - prev;
              prev = cur;
              cur = next;
            }
            if (x[j] == 0.0) break;
          }
        }
      }
      for (auto& v : p) v /= kPi;
      break;
    }
  }
  return p;
}

double zero_freq_bound(const NoiseModel& model, int n_qubits, double total_time) {
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
  if (!finite_pos(total_time)) throw ValidationError("total_time must be finite and > 0");
  const double s0 = spectrum_value(model.temporal, 0.0);
  const double g0 = spatial_spectrum_value(model.spatial, 0.0);
  return std::sqrt(s0 * g0 / (n_qubits * total_time));
}

NoiseKernel::NoiseKernel(const NoiseModel& model, int n_qubits) : model_(model), n_qubits_(n_qubits) {
  model_.validate();
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
  p_ = spatial_corr_table(model_.spatial, n_qubits - 1);
  p_sum_ = n_qubits * p_[0];
  max_abs_p_ = std::abs(p_[0]);
  for (int d = 1; d < n_qubits; ++d) {
    p_sum_ += pair_weight(d) * p_[d];
    max_abs_p_ = std::max(max_abs_p_, std::abs(p_[d]));
  }
}

}  // namespace corrsense
