#pragma once

#include <cstdint>
#include <vector>

#include "corrsense/dicke_spin.hpp"
#include "corrsense/noise.hpp"
#include "corrsense/rng.hpp"
#include "corrsense/uncertainty.hpp"

namespace corrsense {

// Accumulated phases phi(n, l) of one trajectory, row-major in n.
struct PhaseMatrix {
  int n_qubits = 0;
  std::int64_t shots = 0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  NoiseModel model;
  double tau = 0.0;

  double operator()(int n, std::int64_t l) const { return values[static_cast<std::size_t>(n * shots + l)]; }
};

// Draws Gaussian phase matrices with covariance P(n - n') Q(l - l'). The two
// factors are diagonalized separately (eigenvalues below zero but above
// -1e-10 of the largest are clipped to zero); a draw is A_P Z A_Q^T with Z
// standard normal. Requires N * L <= 4096.
class PhaseSampler {
 public:
  PhaseSampler(const NoiseModel& model, int n_qubits, std::int64_t shots, double tau);

  PhaseMatrix sample(std::uint64_t seed, std::uint64_t stream) const;
  // Fills values (size N * L) from rng.
  void sample_into(CounterRng& rng, std::vector<double>& values) const;

  int n_qubits() const { return n_; }
  std::int64_t shots() const { return shots_; }

 private:
  NoiseModel model_;
  int n_;
  std::int64_t shots_;
  double tau_;
  std::vector<double> spatial_factor_;   // N x N, row-major
  std::vector<double> temporal_factor_;  // L x L, row-major
};

PhaseMatrix sample_phase_matrix(const NoiseModel& model, int n_qubits, std::int64_t shots, double tau,
                                std::uint64_t seed);

// Exact 2^N statevector Ramsey sequence, one fresh probe per shot: pi/2
// rotation about y, per-qubit z rotations by pi/2 + theta + phi(n, l),
// pi/2 rotation about y, projective J_z readout. The extra pi/2 turns the
// readout into sin(theta + phi) J_z + cos(theta + phi) J_y per qubit, so
// theta = 0 is the point of maximal slope. N <= 12.
class SqueezedRamsey {
 public:
  explicit SqueezedRamsey(const CollectiveSpinState& state);

  int n_qubits() const { return n_; }
  // Outcome m in {-N/2, ..., N/2} for each shot of `phases`.
  std::vector<double> run(const PhaseMatrix& phases, double theta, CounterRng& rng) const;
  // <m> for one shot without projection noise.
  double expected_outcome(const std::vector<double>& qubit_phases, double theta) const;
  // Distribution of m (index d -> m = N/2 - d) for one shot.
  std::vector<double> outcome_distribution(const std::vector<double>& qubit_phases, double theta) const;

 private:
  int n_;
  std::vector<Complex> prepared_;  // after the first pi/2 pulse
};

std::vector<double> simulate_squeezed_run(const CollectiveSpinState& state, const PhaseMatrix& phases,
                                          const ProtocolParams& p, std::uint64_t seed);

// GHZ parity readout: +1 with probability cos^2((theta + sum_n phi(n, l)) / 2),
// -1 otherwise. theta here is the raw phase, so theta = 0 gives +1 always.
std::vector<double> simulate_ghz_run(const PhaseMatrix& phases, double theta, std::uint64_t seed);

enum class SlopeMode { Analytic, Empirical };

struct McOptions {
  int threads = 1;
  SlopeMode slope = SlopeMode::Analytic;
  int calibration_trajectories = 200;
  // Finite-difference step in theta for the empirical slope.
  double calibration_step = 0.05;
};

struct McEstimate {
  double empirical_variance = 0.0;
  double standard_error = 0.0;  // jackknife
  std::int64_t n_trajectories = 0;
  double analytic_reference = 0.0;
  double z_score = 0.0;
  double mean_estimate = 0.0;
  double mean_standard_error = 0.0;
  double slope = 0.0;
};

// Samples n_trajectories independent experiments of L = p.shots shots each,
// forms b_est = mean_l(m_l) / slope per experiment and compares the spread
// with the exact closed form (the GHZ form for the GHZ family). The true
// signal is b = theta / tau (GHZ: theta / (N tau)). Trajectory i uses stream
// i of `seed`; the result does not depend on the thread count.
McEstimate empirical_estimator_variance(const NoiseModel& model, const SqueezingFamily& family,
                                        const ProtocolParams& p, std::int64_t n_trajectories,
                                        std::uint64_t seed, const McOptions& options = {});

// Z-basis probe state used by the simulator for a family.
CollectiveSpinState probe_state(int n_qubits, const SqueezingFamily& family, const TwistingOptions& options = {});

// Variance and its jackknife standard error.
struct VarianceEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
};
VarianceEstimate jackknife_variance(const std::vector<double>& values);

}  // namespace corrsense
