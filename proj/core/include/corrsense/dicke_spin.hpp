#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace corrsense {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Quantization axis of the Dicke basis |N/2, m>.
//
// Z basis: standard Condon-Shortley phases, J_+ = J_x + i J_y has
// non-negative matrix elements.
//
// Y basis: |m>_y = U |m>_z with U the rotation taking (x, y, z) to
// (-z, -x, y), so that J_y is diagonal and the ladder operator
// -(J_z + i J_x) has non-negative matrix elements. With this phase
// convention the alternating-sign squeezed family has <J_z> > 0 and
// <J_x> = 0.
enum class Basis { Y, Z };

// Pure state of N qubits in the (N+1)-dimensional symmetric subspace.
// amplitudes[k] multiplies |m = k - N/2>.
struct CollectiveSpinState {
  int n_qubits = 0;
  Basis basis = Basis::Z;
  std::vector<Complex> amplitudes;

  double spin() const { return 0.5 * n_qubits; }
  double m(std::size_t k) const { return static_cast<double>(k) - spin(); }
  double norm_squared() const;
};

// Expectation values entering the variance formulas, expressed in the
// protocol frame: mean spin along J_z, squeezed quadrature along J_y.
struct SpinMoments {
  double jz_mean = 0.0;
  double jy2_mean = 0.0;
  double jz2_mean = 0.0;
  double jy_var = 0.0;
  double jz_var = 0.0;

  // Delta J_y / <J_z>; +inf when <J_z> vanishes.
  double squeezing_ratio() const;
};

// First and symmetrized second moments in the lab frame:
// mean[a] = <J_a>, second[a][b] = <J_a J_b + J_b J_a> / 2.
struct LabMoments {
  Vec3 mean{};
  Mat3 second{};
};

enum class FamilyKind { Coherent, PsiKappa, OneAxisTwisted, TwoAxisTwisted, Ghz };

struct SqueezingFamily {
  FamilyKind kind = FamilyKind::Coherent;
  // kappa for PsiKappa, chi*t for the twisted families, unused otherwise.
  double parameter = 0.0;

  static SqueezingFamily coherent() { return {FamilyKind::Coherent, 0.0}; }
  static SqueezingFamily psi_kappa(double kappa) { return {FamilyKind::PsiKappa, kappa}; }
  static SqueezingFamily one_axis(double chi_t) { return {FamilyKind::OneAxisTwisted, chi_t}; }
  static SqueezingFamily two_axis(double chi_t) { return {FamilyKind::TwoAxisTwisted, chi_t}; }
  static SqueezingFamily ghz() { return {FamilyKind::Ghz, 0.0}; }

  bool has_parameter() const {
    return kind == FamilyKind::PsiKappa || kind == FamilyKind::OneAxisTwisted ||
           kind == FamilyKind::TwoAxisTwisted;
  }
  // Throws ValidationError when the parameter is outside its range.
  void validate() const;
};

const char* family_name(FamilyKind kind);

struct TwistingOptions {
  int max_tat_qubits = 2000;
  double norm_tolerance = 1e-10;
};

// sum_m (-1)^m exp(-m^2 / (N kappa^2)) |m>_y, normalized. kappa in (0, 1].
CollectiveSpinState make_psi_kappa(int n_qubits, double kappa);

// |N/2, N/2>_z.
CollectiveSpinState make_coherent_z(int n_qubits);

// Coherent state along +x, written in the Z basis.
CollectiveSpinState make_coherent_x(int n_qubits);

// One- or two-axis twisted state, returned in the Z basis after the frame
// rotation that puts the mean spin on +z and the squeezed quadrature on y.
//
// OAT seeds the coherent state along +x and applies exp(-i chi t J_z^2) as
// diagonal phases. TAT seeds the coherent state along +z and integrates
// H = chi (J_+^2 - J_-^2) / 2i with fixed-step RK4; the step is halved until
// the norm drifts by less than options.norm_tolerance.
CollectiveSpinState make_twisted_state(int n_qubits, const SqueezingFamily& family,
                                       const TwistingOptions& options = {});

// <J_z>, <J_y^2>, <J_z^2> and the two variances, in the basis of the state.
// O(N) ladder algebra.
SpinMoments spin_moments(const CollectiveSpinState& state);

// Full lab-frame moments of a state in either basis.
LabMoments lab_moments(const CollectiveSpinState& state);

// Moments in the frame where the mean spin points along +z and the
// minimum-variance orthogonal quadrature lies along y.
SpinMoments aligned_moments(const LabMoments& lab);

// Exact coherent-state moments: <J_z> = N/2, <J_y^2> = N/4, <J_z^2> = N^2/4.
SpinMoments separable_moments(int n_qubits);

// Frame-aligned moments of the OAT state at the given chi*t, O(N).
SpinMoments oat_moments(int n_qubits, double chi_t);

// Moments for any parameterized family (GHZ has no spin moments and is
// rejected). Coherent returns separable_moments.
SpinMoments family_moments(int n_qubits, const SqueezingFamily& family,
                           const TwistingOptions& options = {});

// exp(-i angle (axis . J)) applied to a Z-basis state. axis must be a unit
// vector.
CollectiveSpinState rotate(const CollectiveSpinState& state, const Vec3& axis, double angle);

// Re-expresses a state in the Z basis (identity for Z-basis input).
CollectiveSpinState to_z_basis(const CollectiveSpinState& state);

// Frame-aligned moments sampled along a two-axis-twisting trajectory.
struct TwistSample {
  double chi_t = 0.0;
  SpinMoments moments;
};

// Integrates TAT from the +z coherent state until chi_t reaches max_chi_t
// or, when stop_past_minimum is set, until the squeezing ratio has risen
// to twice its running minimum. Samples are recorded every
// `record_every` RK4 steps.
std::vector<TwistSample> tat_trajectory(int n_qubits, double max_chi_t, bool stop_past_minimum,
                                        int record_every = 1, const TwistingOptions& options = {});

}  // namespace corrsense
