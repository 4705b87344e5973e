#pragma once

#include <string_view>
#include <vector>

namespace corrsense {

enum class SpectrumKind { White, Gaussian, Linear, Ohmic };

const char* kind_name(SpectrumKind kind);
// Accepts "white", "gaussian", "linear", "ohmic"; throws ValidationError.
SpectrumKind parse_kind(std::string_view name);

// S(omega) with strength A and characteristic frequency sigma:
//   White    A
//   Gaussian A exp(-omega^2 / 2 sigma^2)
//   Linear   A (1 - exp(-|omega| / sigma))
//   Ohmic    A (|omega| / sigma) exp(-|omega| / sigma)
// A = 0 is accepted and describes a noiseless environment.
struct TemporalSpectrum {
  SpectrumKind kind = SpectrumKind::White;
  double strength = 1.0;
  double sigma = 1.0;

  void validate() const;
};

// G(k) on k in [-pi, pi] with the same four shapes, strength B and width k0.
// The default, White with B = 1, carries no spatial correlation.
struct SpatialSpectrum {
  SpectrumKind kind = SpectrumKind::White;
  double strength = 1.0;
  double k0 = 1.0;

  static SpatialSpectrum uncorrelated() { return {}; }
  bool is_uncorrelated() const { return kind == SpectrumKind::White && strength == 1.0; }
  void validate() const;
};

// Separable space-time correlation E[phi_nl phi_n'l'] = Q(l - l') P(n - n').
struct NoiseModel {
  TemporalSpectrum temporal;
  SpatialSpectrum spatial;

  void validate() const {
    temporal.validate();
    spatial.validate();
  }
};

double spectrum_value(const TemporalSpectrum& spec, double omega);
double spatial_spectrum_value(const SpatialSpectrum& spec, double k);

// Variance of the phase accumulated over a window of length tau, closed form.
// gamma(0) = 0; negative tau is rejected.
double gamma(const TemporalSpectrum& spec, double tau);

// R(t) split into a smooth part and the weight of an exact delta(t) term.
struct Autocorrelation {
  double smooth = 0.0;
  double delta_weight = 0.0;
};
Autocorrelation autocorrelation(const TemporalSpectrum& spec, double t);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

// Covariance of the phases of two shots delta_l windows apart,
//   (tau^2 / pi) int_0^inf S(omega) sinc^2(tau omega / 2) cos(tau omega delta_l) d omega,
// by Gauss-Kronrod panels aligned with the oscillation period. The constant
// part of S is integrated analytically. Throws NumericalError when the
// estimated error exceeds 1e-8 of the integrand's L1 norm.
QuadratureResult shot_correlation_quadrature(const TemporalSpectrum& spec, double tau, int delta_l);
double shot_correlation(const TemporalSpectrum& spec, double tau, int delta_l);

// Same quantity from gamma via the stationary-increment identity
//   Q(dl) = [gamma((dl+1) tau) - 2 gamma(dl tau) + gamma((dl-1) tau)] / 2.
double shot_correlation_fast(const TemporalSpectrum& spec, double tau, int delta_l);

// P(dn) = (1 / 2 pi) int_{-pi}^{pi} G(k) exp(i k dn) dk by adaptive quadrature.
double spatial_corr(const SpatialSpectrum& spec, int delta_n);

// P(0..max_delta), using closed forms where they exist and composite
// Gauss-Legendre for the Gaussian shape.
std::vector<double> spatial_corr_table(const SpatialSpectrum& spec, int max_delta);

// sqrt(S(0) G(0) / (N T)): no protocol can beat this in the long-time limit.
double zero_freq_bound(const NoiseModel& model, int n_qubits, double total_time);

// Per-(model, N) cache of the spatial correlations and their sums, plus the
// temporal kernels used by the variance formulas.
class NoiseKernel {
 public:
  NoiseKernel(const NoiseModel& model, int n_qubits);

  const NoiseModel& model() const { return model_; }
  int n_qubits() const { return n_qubits_; }

  // Temporal-only gamma and Q (no P(0) factor).
  double gamma_t(double tau) const { return gamma(model_.temporal, tau); }
  double q(double tau, int delta_l) const { return shot_correlation_fast(model_.temporal, tau, delta_l); }

  double p(int delta_n) const { return p_[static_cast<std::size_t>(delta_n < 0 ? -delta_n : delta_n)]; }
  double p0() const { return p_.front(); }
  const std::vector<double>& p_table() const { return p_; }
  // Multiplicity of qubit pairs with separation delta_n >= 1: 2 (N - delta_n).
  double pair_weight(int delta_n) const { return 2.0 * (n_qubits_ - delta_n); }
  // sum over all ordered pairs (n, n') of P(n - n'), diagonal included.
  double p_sum() const { return p_sum_; }
  double max_abs_p() const { return max_abs_p_; }

  double s0() const { return spectrum_value(model_.temporal, 0.0); }
  double g0() const { return spatial_spectrum_value(model_.spatial, 0.0); }

 private:
  NoiseModel model_;
  int n_qubits_;
  std::vector<double> p_;
  double p_sum_ = 0.0;
  double max_abs_p_ = 0.0;
};

}  // namespace corrsense
