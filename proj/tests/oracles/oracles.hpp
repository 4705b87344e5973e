#pragma once

// Test-side reference implementations. Nothing here calls into the library
// except for the plain data types it returns.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "corrsense/dicke_spin.hpp"
#include "corrsense/noise.hpp"

namespace oracle {

using cd = std::complex<double>;
using Dense = Eigen::VectorXcd;
using Op = Eigen::MatrixXcd;

// ---------------------------------------------------------------- spins

// Basis index bit n set means qubit n is up (sigma_z = +1).
inline Op single_qubit_op(int n_qubits, int qubit, const Eigen::Matrix2cd& op) {
  const int dim = 1 << n_qubits;
  Op out = Op::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const int b = (col >> qubit) & 1;
    for (int rb = 0; rb < 2; ++rb) {
      // Row/column 0 of `op` is the up state.
      const cd v = op(1 - rb, 1 - b);
      if (v == cd(0.0)) continue;
      const int row = (col & ~(1 << qubit)) | (rb << qubit);
      out(row, col) += v;
    }
  }
  return out;
}

inline Eigen::Matrix2cd pauli(char axis) {
  Eigen::Matrix2cd m;
  const cd i(0.0, 1.0);
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Op collective(int n_qubits, char axis) {
  const int dim = 1 << n_qubits;
  Op j = Op::Zero(dim, dim);
  for (int q = 0; q < n_qubits; ++q) j += 0.5 * single_qubit_op(n_qubits, q, pauli(axis));
  return j;
}

// Symmetric Dicke state with k up spins: uniform positive superposition.
inline Dense dicke(int n_qubits, int k) {
  const int dim = 1 << n_qubits;
  Dense v = Dense::Zero(dim);
  int count = 0;
  for (int s = 0; s < dim; ++s) {
    if (__builtin_popcount(static_cast<unsigned>(s)) == k) {
      v(s) = 1.0;
      ++count;
    }
  }
  return v / std::sqrt(static_cast<double>(count));
}

// Embeds Z-basis amplitudes (index k multiplies m = k - N/2).
inline Dense embed_z(int n_qubits, const std::vector<cd>& amplitudes) {
  Dense v = Dense::Zero(1 << n_qubits);
  for (int k = 0; k <= n_qubits; ++k) v += amplitudes[static_cast<std::size_t>(k)] * dicke(n_qubits, k);
  return v;
}

// exp(-i angle n.sigma / 2) for one qubit.
inline Eigen::Matrix2cd qubit_rotation(const std::array<double, 3>& axis, double angle) {
  const cd i(0.0, 1.0);
  Eigen::Matrix2cd gen = axis[0] * pauli('x') + axis[1] * pauli('y') + axis[2] * pauli('z');
  return std::cos(angle / 2) * Eigen::Matrix2cd::Identity() - i * std::sin(angle / 2) * gen;
}

inline Dense apply_each(int n_qubits, const Eigen::Matrix2cd& u, Dense v) {
  for (int q = 0; q < n_qubits; ++q) v = single_qubit_op(n_qubits, q, u) * v;
  return v;
}

// Y-basis amplitudes embedded through the product of single-qubit rotations
// by 2 pi / 3 about (-1, 1, 1) / sqrt(3).
inline Dense embed_y(int n_qubits, const std::vector<cd>& amplitudes) {
  const double s = 1.0 / std::sqrt(3.0);
  return apply_each(n_qubits, qubit_rotation({-s, s, s}, 2.0 * std::numbers::pi / 3.0), embed_z(n_qubits, amplitudes));
}

inline double expect(const Dense& v, const Op& op) { return (v.adjoint() * op * v)(0, 0).real(); }

struct DenseMoments {
  Eigen::Vector3d mean;
  Eigen::Matrix3d second;  // symmetrized
};

inline DenseMoments dense_moments(int n_qubits, const Dense& v) {
  const Op j[3] = {collective(n_qubits, 'x'), collective(n_qubits, 'y'), collective(n_qubits, 'z')};
  DenseMoments m;
  for (int a = 0; a < 3; ++a) {
    m.mean(a) = expect(v, j[a]);
    for (int b = 0; b < 3; ++b) m.second(a, b) = 0.5 * (expect(v, j[a] * j[b]) + expect(v, j[b] * j[a]));
  }
  return m;
}

// |<J>| and the smallest variance orthogonal to it.
struct Squeezing {
  double mean_length;
  double min_variance;
};

inline Squeezing squeezing(const DenseMoments& m) {
  const Eigen::Vector3d n = m.mean.normalized();
  Eigen::Matrix3d cov = m.second - m.mean * m.mean.transpose();
  Eigen::Vector3d e1 = n.unitOrthogonal();
  Eigen::Vector3d e2 = n.cross(e1);
  Eigen::Matrix2d c;
  c << e1.dot(cov * e1), e1.dot(cov * e2), e2.dot(cov * e1), e2.dot(cov * e2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c);
  return {m.mean.norm(), es.eigenvalues()(0)};
}

inline Dense evolve(const Op& h, double t, const Dense& v) {
  const Op u = (cd(0.0, -t) * h).exp();
  return u * v;
}

// ---------------------------------------------------------------- noise

// Smooth part of R(t) and the weight of its delta function, from the
// Fourier transforms of the four spectral shapes.
struct Corr {
  double smooth;
  double delta;
};

inline Corr autocorr(const corrsense::TemporalSpectrum& s, double t) {
  const double a = s.strength, g = s.sigma, x = g * t;
  switch (s.kind) {
    case corrsense::SpectrumKind::White: return {0.0, a};
    case corrsense::SpectrumKind::Gaussian:
      return {a * g / std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * x * x), 0.0};
    case corrsense::SpectrumKind::Linear: return {-a * g / std::numbers::pi / (1.0 + x * x), a};
    case corrsense::SpectrumKind::Ohmic:
      return {a * g / std::numbers::pi * (1.0 - x * x) / ((1.0 + x * x) * (1.0 + x * x)), 0.0};
  }
  return {0.0, 0.0};
}

// Composite Simpson on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  if (panels % 2) ++panels;
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

inline int panels_for(double span_in_widths) {
  return static_cast<int>(std::min(4e6, std::max(4000.0, 400.0 * span_in_widths)));
}

// Covariance of two window integrals of length tau whose starts are
// delta_l * tau apart: int_{-tau}^{tau} (tau - |u|) R(delta_l tau + u) du.
inline double q_time_domain(const corrsense::TemporalSpectrum& s, double tau, int delta_l) {
  const double c = delta_l * tau;
  auto f = [&](double u) { return (tau - std::abs(u)) * autocorr(s, c + u).smooth; };
  const int panels = panels_for(2.0 * tau * s.sigma);
  double v = simpson(f, -tau, 0.0, panels) + simpson(f, 0.0, tau, panels);
  if (delta_l == 0) v += tau * autocorr(s, 0.0).delta;
  return v;
}

inline double gamma_time_domain(const corrsense::TemporalSpectrum& s, double tau) {
  return q_time_domain(s, tau, 0);
}

// P(dn) = (1 / 2 pi) int G(k) cos(k dn) dk by Simpson.
inline double spatial_oracle(const corrsense::SpatialSpectrum& s, int dn) {
  auto g = [&](double k) {
    const double x = std::abs(k) / s.k0;
    double v = 0.0;
    switch (s.kind) {
      case corrsense::SpectrumKind::White: v = 1.0; break;
      case corrsense::SpectrumKind::Gaussian: v = std::exp(-0.5 * x * x); break;
      case corrsense::SpectrumKind::Linear: v = 1.0 - std::exp(-x); break;
      case corrsense::SpectrumKind::Ohmic: v = x * std::exp(-x); break;
    }
    return s.strength * v * std::cos(k * dn);
  };
  return simpson(g, -std::numbers::pi, std::numbers::pi, 20000 + 200 * dn) / (2.0 * std::numbers::pi);
}

// ------------------------------------------------------- estimator variance

// Var(b_est) at theta = 0 from the pair expectations of a dense state and
// the Gaussian identities
//   E[sin a sin b] = exp(-(va + vb) / 2) sinh(cab)
//   E[cos a cos b] = exp(-(va + vb) / 2) cosh(cab),
// with b_est = mean_l(M_l) / (tau exp(-v / 2) <J_z>). cov(n, l, n', l') is
// the phase covariance, v = cov(n, l, n, l).
inline double estimator_variance(int n_qubits, const Dense& state, std::int64_t shots, double tau,
                                 const std::function<double(int, std::int64_t, int, std::int64_t)>& cov) {
  const int n = n_qubits;
  std::vector<Op> sz(n), sy(n);
  for (int q = 0; q < n; ++q) {
    sz[q] = single_qubit_op(n, q, pauli('z'));
    sy[q] = single_qubit_op(n, q, pauli('y'));
  }
  Eigen::MatrixXd zz(n, n), yy(n, n);
  Eigen::VectorXd z1(n), y1(n);
  for (int a = 0; a < n; ++a) {
    z1(a) = expect(state, sz[a]);
    y1(a) = expect(state, sy[a]);
    for (int b = 0; b < n; ++b) {
      zz(a, b) = a == b ? 1.0 : expect(state, sz[a] * sz[b]);
      yy(a, b) = a == b ? 1.0 : expect(state, sy[a] * sy[b]);
    }
  }
  // M = sum_n [sin(phi_n) sz_n + cos(phi_n) sy_n] / 2.
  double second = 0.0, mean = 0.0;
  for (std::int64_t l = 0; l < shots; ++l) {
    for (int a = 0; a < n; ++a) {
      const double va = cov(a, l, a, l);
      mean += 0.5 * std::exp(-0.5 * va) * y1(a);
      for (std::int64_t lp = 0; lp < shots; ++lp) {
        for (int b = 0; b < n; ++b) {
          const double vb = cov(b, lp, b, lp);
          const double c = cov(a, l, b, lp);
          const double damp = std::exp(-0.5 * (va + vb));
          if (l == lp) {
            if (a == b) {
              second += 0.25;
            } else {
              second += 0.25 * damp * (std::sinh(c) * zz(a, b) + std::cosh(c) * yy(a, b));
            }
          } else {
            // Independent projections: product of single-shot expectations.
            second += 0.25 * damp * (std::sinh(c) * z1(a) * z1(b) + std::cosh(c) * y1(a) * y1(b));
          }
        }
      }
    }
  }
  const double var_sum = second - mean * mean;
  const double v0 = cov(0, 0, 0, 0);
  const double jz = 0.5 * z1.sum();
  const double slope = tau * std::exp(-0.5 * v0) * jz;
  const double l = static_cast<double>(shots);
  return var_sum / (l * l * slope * slope);
}

}  // namespace oracle
