#include "corrsense/mc_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "corrsense/error.hpp"
#include "corrsense/parallel.hpp"

namespace corrsense {

namespace {

constexpr int kMaxSimQubits = 12;
constexpr std::int64_t kMaxPhaseEntries = 4096;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Symmetric square root factor A with A A^T = m, clipping tiny negative
// eigenvalues.
std::vector<double> psd_factor(const Eigen::MatrixXd& m, const std::string& what) {
  const auto n = m.rows();
  std::vector<double> out(static_cast<std::size_t>(n * n), 0.0);
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed for " + what);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd root(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda[i] < -1e-10 * lmax) {
      throw NumericalError("covariance is indefinite for " + what + ": eigenvalue " + std::to_string(lambda[i]) +
                           " against largest " + std::to_string(lmax));
    }
    root[i] = std::sqrt(std::max(lambda[i], 0.0));
  }
  Eigen::Map<RowMatrix> a(out.data(), n, n);
  a = es.eigenvectors() * root.asDiagonal();
  return out;
}

std::string describe(const NoiseModel& m, double tau) {
  return std::string(kind_name(m.temporal.kind)) + " temporal (A = " + std::to_string(m.temporal.strength) +
         ", sigma = " + std::to_string(m.temporal.sigma) + ", tau = " + std::to_string(tau) + ") x " +
         kind_name(m.spatial.kind) + " spatial (B = " + std::to_string(m.spatial.strength) +
         ", k0 = " + std::to_string(m.spatial.k0) + ")";
}

// exp(-i (pi/2) sigma_y / 2) on every qubit; bit value 0 is spin up.
void rotate_all_y(std::vector<Complex>& psi, int n) {
  const double c = std::numbers::sqrt2 / 2.0;
  for (int q = 0; q < n; ++q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t x = 0; x < psi.size(); ++x) {
      if (x & bit) continue;
      const Complex up = psi[x], down = psi[x | bit];
      psi[x] = c * (up - down);
      psi[x | bit] = c * (up + down);
    }
  }
}

}  // namespace

PhaseSampler::PhaseSampler(const NoiseModel& model, int n_qubits, std::int64_t shots, double tau)
    : model_(model), n_(n_qubits), shots_(shots), tau_(tau) {
  model.validate();
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
  if (shots < 1) throw ValidationError("shots must be >= 1");
  if (!(tau > 0.0)) throw ValidationError("tau must be > 0");
  if (n_qubits * shots > kMaxPhaseEntries) {
    throw ValidationError("N * L = " + std::to_string(n_qubits * shots) + " exceeds the dense cap of " +
                          std::to_string(kMaxPhaseEntries));
  }
  const NoiseKernel kernel(model, n_qubits);
  Eigen::MatrixXd p(n_qubits, n_qubits);
  for (int a = 0; a < n_qubits; ++a)
    for (int b = 0; b < n_qubits; ++b) p(a, b) = kernel.p(a - b);
  Eigen::MatrixXd q(shots, shots);
  std::vector<double> qrow(static_cast<std::size_t>(shots));
  for (std::int64_t d = 0; d < shots; ++d) qrow[d] = shot_correlation_fast(model.temporal, tau, static_cast<int>(d));
  for (std::int64_t a = 0; a < shots; ++a)
    for (std::int64_t b = 0; b < shots; ++b) q(a, b) = qrow[static_cast<std::size_t>(std::abs(a - b))];
  const std::string what = describe(model, tau);
  spatial_factor_ = psd_factor(p, what);
  temporal_factor_ = psd_factor(q, what);
}

void PhaseSampler::sample_into(CounterRng& rng, std::vector<double>& values) const {
  const auto n = static_cast<Eigen::Index>(n_), l = static_cast<Eigen::Index>(shots_);
  RowMatrix z(n, l);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < l; ++j) z(i, j) = normal(rng);
  Eigen::Map<const RowMatrix> ap(spatial_factor_.data(), n, n);
  Eigen::Map<const RowMatrix> aq(temporal_factor_.data(), l, l);
  values.resize(static_cast<std::size_t>(n * l));
  Eigen::Map<RowMatrix> out(values.data(), n, l);
  out.noalias() = ap * z * aq.transpose();
}

PhaseMatrix PhaseSampler::sample(std::uint64_t seed, std::uint64_t stream) const {
  PhaseMatrix m;
  m.n_qubits = n_;
  m.shots = shots_;
  m.seed = seed;
  m.stream = stream;
  m.model = model_;
  m.tau = tau_;
  CounterRng rng(seed, stream);
  sample_into(rng, m.values);
  return m;
}

PhaseMatrix sample_phase_matrix(const NoiseModel& model, int n_qubits, std::int64_t shots, double tau,
                                std::uint64_t seed) {
  return PhaseSampler(model, n_qubits, shots, tau).sample(seed, 0);
}

SqueezedRamsey::SqueezedRamsey(const CollectiveSpinState& state) : n_(state.n_qubits) {
  if (n_ < 1 || n_ > kMaxSimQubits) {
    throw ValidationError("statevector simulation supports 1.." + std::to_string(kMaxSimQubits) +
                          " qubits, got " + std::to_string(n_));
  }
  const CollectiveSpinState z = to_z_basis(state);
  const std::size_t dim = std::size_t{1} << n_;
  prepared_.assign(dim, Complex{});
  // A string with d down spins belongs to |m = N/2 - d>, index k = N - d.
  std::vector<double> inv_sqrt_binom(static_cast<std::size_t>(n_) + 1);
  for (int d = 0; d <= n_; ++d) {
    inv_sqrt_binom[d] =
        std::exp(-0.5 * (std::lgamma(n_ + 1.0) - std::lgamma(d + 1.0) - std::lgamma(n_ - d + 1.0)));
  }
  for (std::size_t x = 0; x < dim; ++x) {
    const int d = std::popcount(x);
    prepared_[x] = z.amplitudes[static_cast<std::size_t>(n_ - d)] * inv_sqrt_binom[d];
  }
  rotate_all_y(prepared_, n_);
}

std::vector<double> SqueezedRamsey::outcome_distribution(const std::vector<double>& qubit_phases,
                                                         double theta) const {
  const std::size_t dim = prepared_.size();
  // Phase of exp(-i sum_n alpha_n s_n), s_n = +1/2 for bit 0, -1/2 for bit 1.
  std::vector<double> phase(dim);
  double half_sum = 0.0;
  std::vector<double> alpha(static_cast<std::size_t>(n_));
  for (int q = 0; q < n_; ++q) {
    alpha[q] = 0.5 * std::numbers::pi + theta + qubit_phases[q];
    half_sum += 0.5 * alpha[q];
  }
  phase[0] = -half_sum;
  for (std::size_t x = 1; x < dim; ++x) {
    const int low = std::countr_zero(x);
    phase[x] = phase[x & (x - 1)] + alpha[low];
  }
  std::vector<Complex> psi(dim);
  for (std::size_t x = 0; x < dim; ++x) psi[x] = prepared_[x] * std::polar(1.0, phase[x]);
  rotate_all_y(psi, n_);
  std::vector<double> dist(static_cast<std::size_t>(n_) + 1, 0.0);
  for (std::size_t x = 0; x < dim; ++x) dist[std::popcount(x)] += std::norm(psi[x]);
  return dist;
}

double SqueezedRamsey::expected_outcome(const std::vector<double>& qubit_phases, double theta) const {
  const std::vector<double> dist = outcome_distribution(qubit_phases, theta);
  double m = 0.0;
  for (std::size_t d = 0; d < dist.size(); ++d) m += dist[d] * (0.5 * n_ - static_cast<double>(d));
  return m;
}

std::vector<double> SqueezedRamsey::run(const PhaseMatrix& phases, double theta, CounterRng& rng) const {
  if (phases.n_qubits != n_) throw ValidationError("phase matrix has the wrong number of qubits");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(phases.shots));
  std::vector<double> row(static_cast<std::size_t>(n_));
  for (std::int64_t l = 0; l < phases.shots; ++l) {
    for (int q = 0; q < n_; ++q) row[q] = phases(q, l);
    const std::vector<double> dist = outcome_distribution(row, theta);
    double u = uniform(rng), acc = 0.0;
    std::size_t d = 0;
    for (; d + 1 < dist.size(); ++d) {
      acc += dist[d];
      if (u < acc) break;
    }
    out[static_cast<std::size_t>(l)] = 0.5 * n_ - static_cast<double>(d);
  }
  return out;
}

std::vector<double> simulate_squeezed_run(const CollectiveSpinState& state, const PhaseMatrix& phases,
                                          const ProtocolParams& p, std::uint64_t seed) {
  p.validate();
  if (phases.shots != p.shots) throw ValidationError("phase matrix and protocol disagree on L");
  CounterRng rng(seed, phases.stream);
  return SqueezedRamsey(state).run(phases, p.theta, rng);
}

std::vector<double> simulate_ghz_run(const PhaseMatrix& phases, double theta, std::uint64_t seed) {
  CounterRng rng(seed, phases.stream);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(phases.shots));
  for (std::int64_t l = 0; l < phases.shots; ++l) {
    double x = theta;
    for (int q = 0; q < phases.n_qubits; ++q) x += phases(q, l);
    const double c = std::cos(0.5 * x);
    out[static_cast<std::size_t>(l)] = uniform(rng) < c * c ? 1.0 : -1.0;
  }
  return out;
}

CollectiveSpinState probe_state(int n_qubits, const SqueezingFamily& family, const TwistingOptions& options) {
  family.validate();
  switch (family.kind) {
    case FamilyKind::Coherent: return make_coherent_z(n_qubits);
    case FamilyKind::PsiKappa: return to_z_basis(make_psi_kappa(n_qubits, family.parameter));
    case FamilyKind::OneAxisTwisted:
    case FamilyKind::TwoAxisTwisted: return make_twisted_state(n_qubits, family, options);
    case FamilyKind::Ghz: break;
  }
  throw ValidationError("the GHZ probe has no collective-spin state representation");
}

VarianceEstimate jackknife_variance(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 3) throw ValidationError("jackknife needs at least 3 values");
  VarianceEstimate out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(n);
  double d2 = 0.0;
  for (double v : values) d2 += (v - out.mean) * (v - out.mean);
  const double nn = static_cast<double>(n);
  out.variance = d2 / (nn - 1.0);
  // Leave-one-out variance: [D2 - d_i^2 n / (n - 1)] / (n - 2).
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - out.mean;
    loo[i] = (d2 - d * d * nn / (nn - 1.0)) / (nn - 2.0);
    loo_mean += loo[i];
  }
  loo_mean /= nn;
  double s = 0.0;
  for (double v : loo) s += (v - loo_mean) * (v - loo_mean);
  out.standard_error = std::sqrt((nn - 1.0) / nn * s);
  return out;
}

McEstimate empirical_estimator_variance(const NoiseModel& model, const SqueezingFamily& family,
                                        const ProtocolParams& p, std::int64_t n_trajectories,
                                        std::uint64_t seed, const McOptions& options) {
  p.validate();
  model.validate();
  family.validate();
  if (n_trajectories < 100) throw ValidationError("n_trajectories must be >= 100");

  const bool ghz = family.kind == FamilyKind::Ghz;
  const int n = p.n_qubits;
  const NoiseKernel kernel(model, n);
  const PhaseSampler sampler(model, n, p.shots, p.tau);

  std::optional<SqueezedRamsey> sim;
  SpinMoments moments;
  McEstimate est;
  if (ghz) {
    est.analytic_reference = variance_ghz(kernel, p, GhzMode::Exact).total_variance;
    est.slope = ghz_slope(kernel, p);
  } else {
    const CollectiveSpinState state = probe_state(n, family);
    sim.emplace(state);
    moments = spin_moments(state);
    est.analytic_reference = variance_full(moments, kernel, p).total_variance;
    est.slope = calibrated_slope(moments, kernel, p);
  }

  // For GHZ the readout mean is -sin(theta + sum phi) and the phase is N b tau.
  const double sign = ghz ? -1.0 : 1.0;
  const double ghz_theta = 0.5 * std::numbers::pi + p.theta;

  if (options.slope == SlopeMode::Empirical) {
    const int batch = std::max(1, options.calibration_trajectories);
    const double h = options.calibration_step;
    std::vector<double> per(static_cast<std::size_t>(batch));
    // Held-out streams start after the estimation streams.
    parallel_for(per.size(), options.threads, [&](std::size_t i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(n_trajectories) + i);
      std::vector<double> phi;
      sampler.sample_into(rng, phi);
      std::vector<double> row(static_cast<std::size_t>(n));
      double acc = 0.0;
      for (std::int64_t l = 0; l < p.shots; ++l) {
        double total = 0.0;
        for (int q = 0; q < n; ++q) {
          row[q] = phi[static_cast<std::size_t>(q * p.shots + l)];
          total += row[q];
        }
        if (ghz) {
          acc += (std::cos(ghz_theta + h + total) - std::cos(ghz_theta - h + total)) / (2.0 * h);
        } else {
          acc += (sim->expected_outcome(row, p.theta + h) - sim->expected_outcome(row, p.theta - h)) / (2.0 * h);
        }
      }
      per[i] = acc / static_cast<double>(p.shots);
    });
    double mean = 0.0;
    for (double v : per) mean += v;
    mean /= static_cast<double>(batch);
    est.slope = sign * mean * p.tau * (ghz ? n : 1);
  }

  std::vector<double> b_est(static_cast<std::size_t>(n_trajectories));
  parallel_for(b_est.size(), options.threads, [&](std::size_t i) {
    CounterRng rng(seed, i);
    PhaseMatrix phases;
    phases.n_qubits = n;
    phases.shots = p.shots;
    phases.seed = seed;
    phases.stream = i;
    sampler.sample_into(rng, phases.values);
    const std::vector<double> m = ghz ? simulate_ghz_run(phases, ghz_theta, seed ^ 0x5bd1e995ULL)
                                      : sim->run(phases, p.theta, rng);
    double s = 0.0;
    for (double v : m) s += v;
    b_est[i] = sign * s / (static_cast<double>(p.shots) * est.slope);
  });

  const VarianceEstimate v = jackknife_variance(b_est);
  est.n_trajectories = n_trajectories;
  est.empirical_variance = v.variance;
  est.standard_error = v.standard_error;
  est.mean_estimate = v.mean;
  est.mean_standard_error = std::sqrt(v.variance / static_cast<double>(n_trajectories));
  est.z_score = (est.empirical_variance - est.analytic_reference) / est.standard_error;
  return est;
}

}  // namespace corrsense
