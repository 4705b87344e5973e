#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "corrsense/dicke_spin.hpp"
#include "corrsense/noise.hpp"
#include "corrsense/uncertainty.hpp"

namespace corrsense {

// Bounds left at 0 take their defaults:
//   tau     [1e-4, 1e2] / A, capped at T ([1e-6 T, T] without noise); the GHZ
//           lower bound is divided by N
//   kappa   [max(2 / N, 1e-3), 1]
//   OAT     chi t in [1e-5, pi / 2]
//   TAT     chi t along the sampled trajectory
struct OptimizerOptions {
  int tau_grid = 24;
  int squeeze_grid = 24;
  double rel_tol = 1e-4;
  int max_sweeps = 60;
  int starts = 3;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  double squeeze_lo = 0.0;
  double squeeze_hi = 0.0;
  TwistingOptions twisting;
};

struct OptimizationResult {
  double tau_opt = 0.0;
  std::optional<double> squeeze_opt;  // kappa or chi t
  double min_stddev = 0.0;
  double gain_r = 0.0;
  std::int64_t shots = 0;
  std::int64_t evaluations = 0;
  std::int64_t skipped = 0;  // non-finite or overflowing objective points
  bool converged = false;
  SpinMoments moments;
  UncertaintyBreakdown breakdown;
};

// Minimizes the stddev of the chosen formula over tau and, for
// parameterized families, the squeezing parameter. Log-spaced grid, then
// coordinate-wise golden-section refinement from the best grid minima.
// Equal minima resolve to the smaller tau, then the larger parameter.
// gain_r is left at 0; see optimize_with_gain.
OptimizationResult optimize_protocol(const NoiseModel& model, FamilyKind family, int n_qubits,
                                     double total_time, FormulaTag formula = FormulaTag::Full,
                                     const OptimizerOptions& options = {});

// Separable baseline with exact coherent-state moments, tau optimized.
OptimizationResult optimize_separable(const NoiseModel& model, int n_qubits, double total_time,
                                      FormulaTag formula = FormulaTag::Full,
                                      const OptimizerOptions& options = {});

// optimize_protocol with gain_r = baseline stddev / optimized stddev. GHZ
// formulas compare against the exact separable formula.
OptimizationResult optimize_with_gain(const NoiseModel& model, FamilyKind family, int n_qubits,
                                      double total_time, FormulaTag formula = FormulaTag::Full,
                                      const OptimizerOptions& options = {});

struct GainPoint {
  int n_qubits = 0;
  double gain_r = 0.0;
  double tau_opt = 0.0;
  double squeeze_opt = 0.0;  // NaN for families without a parameter
  double min_stddev = 0.0;
  double baseline_stddev = 0.0;
  double baseline_tau = 0.0;
  double bound = 0.0;
};

// One optimization per N, run on up to `threads` workers; output order
// follows n_grid.
std::vector<GainPoint> gain_curve(const NoiseModel& model, FamilyKind family, const std::vector<int>& n_grid,
                                  double total_time, FormulaTag formula = FormulaTag::Full,
                                  const OptimizerOptions& options = {}, int threads = 1);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  std::size_t points = 0;
  bool degenerate = false;  // constant input: exponent 0, r_squared NaN
};

// Least squares of log(value) on log(N) over points with N in [n_min, n_max].
// Needs at least 5 such points, all with value > 0.
ScalingFit scaling_exponent(const std::vector<std::pair<double, double>>& points, double n_min, double n_max);

// Even integers log-spaced over [lo, hi], deduplicated, endpoints included.
std::vector<int> even_log_grid(int lo, int hi, int count);
// Integers log-spaced over [lo, hi], deduplicated.
std::vector<int> log_grid(int lo, int hi, int count);

}  // namespace corrsense
