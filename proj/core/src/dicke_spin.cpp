#include "corrsense/dicke_spin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "corrsense/error.hpp"
#include "spin_algebra.hpp"

namespace corrsense {

double CollectiveSpinState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

double SpinMoments::squeezing_ratio() const {
  if (!(jz_mean > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(jy_var, 0.0)) / jz_mean;
}

void SqueezingFamily::validate() const {
  switch (kind) {
    case FamilyKind::PsiKappa:
      if (!(parameter > 0.0 && parameter <= 1.0)) {
        throw ValidationError("kappa must lie in (0, 1], got " + std::to_string(parameter));
      }
      break;
    case FamilyKind::OneAxisTwisted:
    case FamilyKind::TwoAxisTwisted:
      if (!(parameter >= 0.0) || !std::isfinite(parameter)) {
        throw ValidationError("chi_t must be finite and >= 0, got " + std::to_string(parameter));
      }
      break;
    case FamilyKind::Coherent:
    case FamilyKind::Ghz:
      break;
  }
}

const char* family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Coherent: return "separable";
    case FamilyKind::PsiKappa: return "psi";
    case FamilyKind::OneAxisTwisted: return "oat";
    case FamilyKind::TwoAxisTwisted: return "tat";
    case FamilyKind::Ghz: return "ghz";
  }
  return "unknown";
}

namespace {

void require_qubits(int n_qubits) {
  if (n_qubits < 1) {
    throw ValidationError("n_qubits must be >= 1, got " + std::to_string(n_qubits));
  }
}

// Moments in the frame in which the basis is quantized: (x', y', z') with
// the ladder operator J_x' + i J_y' having the non-negative elements l_k.
LabMoments native_moments(const std::vector<Complex>& c, int n_qubits) {
  const std::size_t dim = c.size();
  const double j = 0.5 * n_qubits;
  Complex a1{}, a2{}, b{};
  double az = 0.0, azz = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double m = static_cast<double>(k) - j;
    const double p = std::norm(c[k]);
    az += p * m;
    azz += p * m * m;
    if (k + 1 < dim) {
      const double lk = detail::ladder(n_qubits, k);
      const Complex t = std::conj(c[k + 1]) * c[k] * lk;
      a1 += t;
      b += t * (2.0 * m + 1.0);
      if (k + 2 < dim) a2 += std::conj(c[k + 2]) * c[k] * lk * detail::ladder(n_qubits, k + 1);
    }
  }
  LabMoments out;
  const double casimir = j * (j + 1.0);
  out.mean = {a1.real(), a1.imag(), az};
  out.second[0][0] = 0.5 * a2.real() + 0.5 * (casimir - azz);
  out.second[1][1] = -0.5 * a2.real() + 0.5 * (casimir - azz);
  out.second[2][2] = azz;
  out.second[0][1] = out.second[1][0] = 0.5 * a2.imag();
  out.second[0][2] = out.second[2][0] = 0.5 * b.real();
  out.second[1][2] = out.second[2][1] = 0.5 * b.imag();
  return out;
}

// Y-basis frame: (x', y', z') = (-z, -x, y), i.e. J_x = -J_y', J_y = J_z',
// J_z = -J_x'.
LabMoments y_native_to_lab(const LabMoments& native) {
  constexpr std::array<int, 3> src{1, 2, 0};
  constexpr std::array<double, 3> sign{-1.0, 1.0, -1.0};
  LabMoments lab;
  for (int a = 0; a < 3; ++a) {
    lab.mean[a] = sign[a] * native.mean[src[a]];
    for (int b = 0; b < 3; ++b) {
      lab.second[a][b] = sign[a] * sign[b] * native.second[src[a]][src[b]];
    }
  }
  return lab;
}

}  // namespace

CollectiveSpinState make_psi_kappa(int n_qubits, double kappa) {
  require_qubits(n_qubits);
  SqueezingFamily::psi_kappa(kappa).validate();

  CollectiveSpinState s;
  s.n_qubits = n_qubits;
  s.basis = Basis::Y;
  s.amplitudes.resize(static_cast<std::size_t>(n_qubits) + 1);

  // Log-domain Gaussian weights, shifted so the largest is exp(0).
  const double scale = 1.0 / (n_qubits * kappa * kappa);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
    max_log = std::max(max_log, -s.m(k) * s.m(k) * scale);
  }
  double norm2 = 0.0;
  for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
    // (-1)^m = e^{i pi m}; the common factor e^{-i pi N/2} is dropped.
    const double w = std::exp(-s.m(k) * s.m(k) * scale - max_log);
    s.amplitudes[k] = (k % 2 == 0) ? w : -w;
    norm2 += w * w;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& a : s.amplitudes) a *= inv;
  return s;
}

CollectiveSpinState make_coherent_z(int n_qubits) {
  require_qubits(n_qubits);
  CollectiveSpinState s;
  s.n_qubits = n_qubits;
  s.basis = Basis::Z;
  s.amplitudes.assign(static_cast<std::size_t>(n_qubits) + 1, Complex{});
  s.amplitudes.back() = 1.0;
  return s;
}

CollectiveSpinState make_coherent_x(int n_qubits) {
  require_qubits(n_qubits);
  CollectiveSpinState s;
  s.n_qubits = n_qubits;
  s.basis = Basis::Z;
  s.amplitudes.resize(static_cast<std::size_t>(n_qubits) + 1);
  const double n = n_qubits;
  for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0);
    s.amplitudes[k] = std::exp(0.5 * (log_binom - n * std::numbers::ln2));
  }
  return s;
}

LabMoments lab_moments(const CollectiveSpinState& state) {
  if (state.amplitudes.size() != static_cast<std::size_t>(state.n_qubits) + 1) {
    throw ValidationError("amplitude count must be n_qubits + 1");
  }
  LabMoments native = native_moments(state.amplitudes, state.n_qubits);
  return state.basis == Basis::Z ? native : y_native_to_lab(native);
}

SpinMoments spin_moments(const CollectiveSpinState& state) {
  const LabMoments lab = lab_moments(state);
  SpinMoments out;
  out.jz_mean = lab.mean[2];
  out.jy2_mean = std::max(lab.second[1][1], 0.0);
  out.jz2_mean = std::max(lab.second[2][2], 0.0);
  out.jy_var = std::max(out.jy2_mean - lab.mean[1] * lab.mean[1], 0.0);
  out.jz_var = std::max(out.jz2_mean - out.jz_mean * out.jz_mean, 0.0);
  return out;
}

SpinMoments aligned_moments(const LabMoments& lab) {
  const detail::AlignedFrame f = detail::align_frame(lab);
  SpinMoments out;
  out.jz_mean = f.mean_length;
  out.jy2_mean = std::max(f.min_variance, 0.0);
  out.jy_var = out.jy2_mean;
  out.jz2_mean = std::max(detail::quadratic_form(lab.second, f.z_axis), 0.0);
  out.jz_var = std::max(out.jz2_mean - out.jz_mean * out.jz_mean, 0.0);
  return out;
}

SpinMoments separable_moments(int n_qubits) {
  require_qubits(n_qubits);
  const double n = n_qubits;
  SpinMoments out;
  out.jz_mean = 0.5 * n;
  out.jy2_mean = 0.25 * n;
  out.jz2_mean = 0.25 * n * n;
  out.jy_var = 0.25 * n;
  out.jz_var = 0.0;
  return out;
}

CollectiveSpinState rotate(const CollectiveSpinState& state, const Vec3& axis, double angle) {
  if (state.basis != Basis::Z) throw ValidationError("rotate expects a Z-basis state");
  const int n = state.n_qubits;
  const std::size_t dim = state.amplitudes.size();
  const double j = 0.5 * n;
  CollectiveSpinState out = state;
  if (angle == 0.0 || n == 0) return out;

  const Complex up(0.5 * axis[0], -0.5 * axis[1]);    // coefficient of J_+
  const Complex down(0.5 * axis[0], 0.5 * axis[1]);   // coefficient of J_-
  auto apply_h = [&](const std::vector<Complex>& in, std::vector<Complex>& res) {
    for (std::size_t k = 0; k < dim; ++k) {
      Complex v = axis[2] * (static_cast<double>(k) - j) * in[k];
      if (k > 0) v += up * detail::ladder(n, k - 1) * in[k - 1];
      if (k + 1 < dim) v += down * detail::ladder(n, k) * in[k + 1];
      res[k] = v;
    }
  };

  // The spectrum of axis.J is {-j..j}, so |step| * j <= 0.5 keeps each
  // Taylor series short and well conditioned.
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(angle) * j / 0.5)));
  const double dt = angle / steps;
  std::vector<Complex> term(dim), next(dim);
  for (int s = 0; s < steps; ++s) {
    term = out.amplitudes;
    for (int p = 1; p < 64; ++p) {
      apply_h(term, next);
      double tn = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        term[k] = next[k] * Complex(0.0, -dt / p);
        out.amplitudes[k] += term[k];
        tn += std::norm(term[k]);
      }
      if (tn < 1e-34) break;
    }
  }
  return out;
}

CollectiveSpinState to_z_basis(const CollectiveSpinState& state) {
  if (state.basis == Basis::Z) return state;
  // U with U J_z U^dag = J_y, U J_x U^dag = -J_z, U J_y U^dag = -J_x: the
  // rotation by 2 pi / 3 about (-1, 1, 1) / sqrt(3).
  CollectiveSpinState z = state;
  z.basis = Basis::Z;
  const double inv = 1.0 / std::sqrt(3.0);
  return rotate(z, {-inv, inv, inv}, 2.0 * std::numbers::pi / 3.0);
}

SpinMoments family_moments(int n_qubits, const SqueezingFamily& family,
                           const TwistingOptions& options) {
  family.validate();
  switch (family.kind) {
    case FamilyKind::Coherent: return separable_moments(n_qubits);
    case FamilyKind::PsiKappa: return spin_moments(make_psi_kappa(n_qubits, family.parameter));
    case FamilyKind::OneAxisTwisted: return oat_moments(n_qubits, family.parameter);
    case FamilyKind::TwoAxisTwisted: return detail::tat_moments(n_qubits, family.parameter, options);
    case FamilyKind::Ghz: break;
  }
  throw ValidationError("GHZ probes have no collective-spin moments; use the GHZ evaluators");
}

}  // namespace corrsense
