#pragma once

#include <cstdint>
#include <string_view>

#include "corrsense/dicke_spin.hpp"
#include "corrsense/noise.hpp"

namespace corrsense {

// One sensing configuration: N probes, total time T split into L shots of
// length tau. make() fixes L = round(T / tau) and then sets tau = T / L so
// that L tau = T holds exactly.
struct ProtocolParams {
  int n_qubits = 1;
  double total_time = 1.0;
  double tau = 1.0;
  std::int64_t shots = 1;
  // Offset from the point of maximal slope of the Ramsey fringe.
  double theta = 0.0;

  static ProtocolParams make(int n_qubits, double total_time, double tau, double theta = 0.0);
  void validate() const;
};

enum class FormulaTag {
  Full,            // exact variance with space-time correlated phases
  TemporalOnly,    // exact, spatially uncorrelated
  Simplified,      // first-order expansion of the cross-shot sum
  SpatialApprox,   // first-order form with the spatial correction
  NoNoise,
  Markovian,       // white temporal noise, no spatial correlation
  GhzExact,
  GhzSimple,
};

const char* formula_name(FormulaTag tag);
FormulaTag parse_formula(std::string_view name);
bool is_ghz(FormulaTag tag);

// Var(b_est) split by origin, each in squared-frequency units.
struct UncertaintyBreakdown {
  double shot_noise = 0.0;
  double single_shot_dephasing = 0.0;
  double cross_shot = 0.0;
  double cross_qubit = 0.0;
  double total_variance = 0.0;
  double total_stddev = 0.0;
  double fundamental_bound = 0.0;
  FormulaTag formula = FormulaTag::Full;
};

// Exact variance. Pair sums are reduced by stationarity; the cross-shot sum
// is its closed linear part plus the sinh(x) - x remainder, cut once
// |x| < 1e-6 for all qubit separations (from delta_l >= 3 on). Throws
// NumericalError when a dephasing exponent exceeds 700 and ValidationError
// when jz_mean is zero.
UncertaintyBreakdown variance_full(const SpinMoments& m, const NoiseKernel& kernel, const ProtocolParams& p);
UncertaintyBreakdown variance_full(const SpinMoments& m, const NoiseModel& model, const ProtocolParams& p);

UncertaintyBreakdown variance_temp_unc(const SpinMoments& m, const TemporalSpectrum& temporal,
                                       const ProtocolParams& p);

// sinh x ~ x in the cross-shot sum, no spatial correlation.
UncertaintyBreakdown variance_simplified(const SpinMoments& m, const TemporalSpectrum& temporal,
                                         const ProtocolParams& p);

// First-order form with spatial correlation. The last term is kept at finite T
// as G(0) gamma(T) / (N T^2), which tends to S(0) G(0) / (N T) for long T.
UncertaintyBreakdown variance_spatial_approx(const SpinMoments& m, const NoiseKernel& kernel,
                                             const ProtocolParams& p);

UncertaintyBreakdown variance_no_noise(const SpinMoments& m, const ProtocolParams& p);

// Requires White temporal noise.
UncertaintyBreakdown variance_markovian(const SpinMoments& m, const TemporalSpectrum& temporal,
                                        const ProtocolParams& p);

// GHZ probe with parity readout. The collective phase sum_n phi_n has
// variance gamma(tau) * sum_{n,n'} P(n - n'), which is N gamma(tau) without
// spatial correlation.
enum class GhzMode { Exact, Simple };
UncertaintyBreakdown variance_ghz(const NoiseKernel& kernel, const ProtocolParams& p, GhzMode mode);
UncertaintyBreakdown variance_ghz(const TemporalSpectrum& temporal, const ProtocolParams& p, GhzMode mode);

// Dispatch on tag. GHZ tags ignore the moments.
UncertaintyBreakdown evaluate(FormulaTag tag, const SpinMoments& m, const NoiseKernel& kernel,
                              const ProtocolParams& p);

// d<M>/db per shot at the optimal operating point: tau exp(-gamma / 2) <J_z>.
double calibrated_slope(const SpinMoments& m, const NoiseKernel& kernel, const ProtocolParams& p);
double calibrated_slope(const SpinMoments& m, const TemporalSpectrum& temporal, const ProtocolParams& p);

// N tau exp(-Var(sum_n phi_n) / 2) for the GHZ parity signal.
double ghz_slope(const NoiseKernel& kernel, const ProtocolParams& p);

}  // namespace corrsense
