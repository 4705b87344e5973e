#include "corrsense_cli/mc_grid.hpp"

#include <algorithm>
#include <cmath>

#include "corrsense/error.hpp"
#include "corrsense/rng.hpp"
#include "corrsense/uncertainty.hpp"

namespace corrsense::cli {

namespace {

using SK = SpectrumKind;
using SF = SqueezingFamily;

McCase make_case(std::string label, TemporalSpectrum t, SpatialSpectrum s, SF family, int n, double total,
                 double tau) {
  return {std::move(label), {t, s}, family, n, total, tau};
}

std::vector<McCase> default_grid(const NoiseModel& m) {
  return {
      make_case("separable-4", m.temporal, m.spatial, SF::coherent(), 4, 25.0, 0.5),
      make_case("separable-2", m.temporal, m.spatial, SF::coherent(), 2, 20.0, 1.0),
      make_case("psi-6", m.temporal, m.spatial, SF::psi_kappa(0.6), 6, 12.0, 0.3),
      make_case("oat-4", m.temporal, m.spatial, SF::one_axis(0.2), 4, 12.0, 0.4),
      make_case("tat-4", m.temporal, m.spatial, SF::two_axis(0.15), 4, 12.0, 0.4),
      make_case("ghz-3", m.temporal, m.spatial, SF::ghz(), 3, 8.0, 0.2),
  };
}

std::vector<McCase> acceptance_grid() {
  const SpatialSpectrum none = SpatialSpectrum::uncorrelated();
  return {
      make_case("a01", {SK::White, 0.0, 1.0}, none, SF::coherent(), 4, 50.0, 1.0),
      make_case("a02", {SK::White, 1.0, 1.0}, none, SF::coherent(), 4, 25.0, 0.5),
      make_case("a03", {SK::White, 1.0, 1.0}, none, SF::psi_kappa(0.6), 6, 12.0, 0.3),
      make_case("a04", {SK::Gaussian, 1.0, 1.0}, none, SF::coherent(), 2, 20.0, 0.5),
      make_case("a05", {SK::Gaussian, 1.0, 1.0}, {SK::Gaussian, 1.0, 1.0}, SF::psi_kappa(0.5), 6, 20.0, 0.5),
      make_case("a06", {SK::Linear, 0.5, 1.0}, {SK::Ohmic, 1.0, 1.0}, SF::one_axis(0.2), 4, 20.0, 0.5),
      make_case("a07", {SK::Ohmic, 1.0, 1.0}, none, SF::psi_kappa(0.6), 6, 12.0, 0.3),
      make_case("a08", {SK::Ohmic, 1.0, 1.0}, none, SF::ghz(), 3, 20.0, 0.5),
      make_case("a09", {SK::Gaussian, 1.0, 1.0}, none, SF::two_axis(0.15), 6, 20.0, 0.5),
      make_case("a10", {SK::White, 1.0, 1.0}, none, SF::ghz(), 2, 12.0, 0.3),
      make_case("a11", {SK::Linear, 1.0, 1.0}, none, SF::coherent(), 8, 16.0, 0.4),
      make_case("a12", {SK::Ohmic, 1.0, 2.0}, none, SF::one_axis(0.1), 8, 9.0, 0.3),
      make_case("a13", {SK::White, 1.0, 1.0}, {SK::Linear, 1.0, 1.0}, SF::two_axis(0.2), 4, 16.0, 0.4),
      make_case("a14", {SK::Gaussian, 1.0, 0.5}, none, SF::ghz(), 4, 15.0, 0.3),
      make_case("a15", {SK::Linear, 1.0, 0.5}, {SK::White, 0.5, 1.0}, SF::psi_kappa(0.8), 4, 25.0, 0.5),
      make_case("a16", {SK::Ohmic, 1.0, 1.0}, none, SF::coherent(), 1, 40.0, 1.0),
      make_case("a17", {SK::White, 0.5, 1.0}, {SK::Gaussian, 1.0, 2.0}, SF::one_axis(0.25), 6, 20.0, 0.5),
      make_case("a18", {SK::Linear, 0.5, 1.0}, none, SF::ghz(), 5, 10.0, 0.2),
      make_case("a19", {SK::Gaussian, 1.0, 2.0}, none, SF::psi_kappa(0.4), 8, 10.0, 0.25),
      make_case("a20", {SK::Ohmic, 1.0, 1.0}, {SK::Ohmic, 1.0, 1.0}, SF::two_axis(0.1), 8, 16.0, 0.4),
  };
}

std::string spatial_label(const SpatialSpectrum& s) {
  return s.is_uncorrelated() ? "trivial" : kind_name(s.kind);
}

}  // namespace

std::vector<McCase> mc_grid(std::string_view name, const NoiseModel& base) {
  if (name == "default") return default_grid(base);
  if (name == "zero-noise") {
    NoiseModel quiet = base;
    quiet.temporal.strength = 0.0;
    return default_grid(quiet);
  }
  if (name == "acceptance") return acceptance_grid();
  throw ValidationError("grid must be default, zero-noise or acceptance, got '" + std::string(name) + "'");
}

McReport run_mc_grid(const std::vector<McCase>& cases, std::int64_t trajectories, std::uint64_t seed,
                     const McOptions& options) {
  McReport report{Table({"config", "temporal", "A", "sigma", "spatial", "family", "parameter", "N", "tau", "shots",
                         "trajectories", "empirical", "standard_error", "analytic", "z"})};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const McCase& c = cases[i];
    const ProtocolParams p = ProtocolParams::make(c.n_qubits, c.total_time, c.tau);
    CounterRng derive(seed, (std::uint64_t{1} << 48) + i);
    const McEstimate e = empirical_estimator_variance(c.model, c.family, p, trajectories, derive(), options);
    report.table.add_row({c.label, kind_name(c.model.temporal.kind), c.model.temporal.strength, c.model.temporal.sigma,
                          spatial_label(c.model.spatial), family_name(c.family.kind), c.family.parameter,
                          std::int64_t{c.n_qubits}, p.tau, p.shots, e.n_trajectories, e.empirical_variance,
                          e.standard_error, e.analytic_reference, e.z_score});
    const double z = std::abs(e.z_score);
    report.max_abs_z = std::max(report.max_abs_z, std::isfinite(z) ? z : HUGE_VAL);
    report.within_3 += z <= 3.0;
  }
  return report;
}

}  // namespace corrsense::cli
