#include "corrsense_cli/figures.hpp"

#include <cmath>
#include <utility>

#include "corrsense/error.hpp"
#include "corrsense/optimizer.hpp"
#include "corrsense/parallel.hpp"

namespace corrsense::cli {

namespace {

constexpr SpectrumKind kAllKinds[] = {SpectrumKind::White, SpectrumKind::Gaussian, SpectrumKind::Linear,
                                      SpectrumKind::Ohmic};

std::vector<SpectrumKind> spectra_or_all(const FigureOptions& o) {
  if (!o.spectra.empty()) return o.spectra;
  return {std::begin(kAllKinds), std::end(kAllKinds)};
}

int pick(int value, int fallback) { return value > 0 ? value : fallback; }
double pick(double value, double fallback) { return value > 0.0 ? value : fallback; }

std::vector<double> log_points(double lo, double hi, int count) {
  std::vector<double> out;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return out;
}

using Series = std::vector<std::pair<double, double>>;

// Appends a fit row when at least five points fall in [lo, hi].
void add_fit(Table& fits, std::vector<Cell> labels, const Series& s, double lo, double hi) {
  std::size_t inside = 0;
  for (const auto& [x, y] : s) inside += (x >= lo && x <= hi && y > 0.0);
  if (inside < 5) return;
  const ScalingFit f = scaling_exponent(s, lo, hi);
  labels.insert(labels.end(), {f.exponent, f.intercept, f.r_squared, f.n_min, f.n_max,
                               static_cast<std::int64_t>(f.points)});
  fits.add_row(std::move(labels));
}

std::vector<std::string> fit_columns(std::vector<std::string> labels) {
  for (const char* c : {"exponent", "intercept", "r_squared", "x_min", "x_max", "points"}) labels.emplace_back(c);
  return labels;
}

Series column(const std::vector<GainPoint>& g, double GainPoint::*field) {
  Series s;
  for (const auto& p : g) s.emplace_back(p.n_qubits, p.*field);
  return s;
}

// Gain versus total time at N = 100 and versus N at AT = 1e3, white noise.
std::vector<Panel> fig2(const FigureOptions& o) {
  const double a = o.strength;
  const NoiseModel model{{SpectrumKind::White, a, 1.0}, {}};
  const std::vector<std::string> cols = {"N", "T", "tau_opt", "kappa_opt", "delta_b", "baseline_delta_b",
                                         "gain_r", "bound"};
  auto row = [](double t, const GainPoint& g) {
    return std::vector<Cell>{std::int64_t{g.n_qubits}, t, g.tau_opt, g.squeeze_opt, g.min_stddev,
                             g.baseline_stddev, g.gain_r, g.bound};
  };

  Panel time{"fig2_time", Table(cols)};
  const std::vector<double> times = log_points(1e1 / a, 1e5 / a, pick(o.points, 17));
  std::vector<GainPoint> by_time(times.size());
  const int n_fixed = 100;
  parallel_for(times.size(), o.threads, [&](std::size_t i) {
    by_time[i] = gain_curve(model, FamilyKind::PsiKappa, {n_fixed}, times[i]).front();
  });
  for (std::size_t i = 0; i < times.size(); ++i) time.table.add_row(row(times[i], by_time[i]));

  Panel gain{"fig2_gain", Table(cols)};
  const double t = pick(o.total_time, 1e3) / a;
  const auto grid = even_log_grid(pick(o.n_min, 2), pick(o.n_max, 10000), pick(o.points, 24));
  for (const auto& g : gain_curve(model, FamilyKind::PsiKappa, grid, t, FormulaTag::Full, {}, o.threads)) {
    gain.table.add_row(row(t, g));
  }
  return {std::move(time), std::move(gain)};
}

// Optimized |psi_kappa> under the four temporal spectra, sigma = A / 2.
std::vector<Panel> fig3(const FigureOptions& o) {
  const double a = o.strength;
  const double sigma = pick(o.sigma, 0.5) * a;
  const double t = pick(o.total_time, 1e4) / a;
  const auto grid = even_log_grid(pick(o.n_min, 2), pick(o.n_max, 10000), pick(o.points, 24));

  Panel data{"fig3", Table({"spectrum", "N", "T", "tau_opt", "kappa_opt", "delta_b", "baseline_delta_b", "gain_r",
                            "bound"})};
  Panel fits{"fig3_fits", Table(fit_columns({"spectrum", "quantity"}))};
  for (SpectrumKind kind : spectra_or_all(o)) {
    const NoiseModel model{{kind, a, sigma}, {}};
    const auto g = gain_curve(model, FamilyKind::PsiKappa, grid, t, FormulaTag::Full, {}, o.threads);
    for (const auto& p : g) {
      data.table.add_row({kind_name(kind), std::int64_t{p.n_qubits}, t, p.tau_opt, p.squeeze_opt, p.min_stddev,
                          p.baseline_stddev, p.gain_r, p.bound});
    }
    add_fit(fits.table, {kind_name(kind), "delta_b"}, column(g, &GainPoint::min_stddev), 1e3, 1e4);
    add_fit(fits.table, {kind_name(kind), "tau_opt"}, column(g, &GainPoint::tau_opt), 1e3, 1e4);
    add_fit(fits.table, {kind_name(kind), "kappa_opt"}, column(g, &GainPoint::squeeze_opt), 1e3, 1e4);
  }
  return {std::move(data), std::move(fits)};
}

// All temporal x spatial pairs, A / sigma = B / k0 = 1 / 8.
std::vector<Panel> fig4(const FigureOptions& o) {
  const double a = o.strength;
  const double sigma = pick(o.sigma, 8.0) * a;
  const double t = pick(o.total_time, 1e3) / a;
  const auto grid = even_log_grid(pick(o.n_min, 10), pick(o.n_max, 1000), pick(o.points, 12));

  Panel data{"fig4", Table({"spectrum", "spatial", "N", "T", "tau_opt", "kappa_opt", "delta_b", "baseline_delta_b",
                            "gain_r", "bound"})};
  for (SpectrumKind kind : spectra_or_all(o)) {
    for (SpectrumKind spatial : kAllKinds) {
      const NoiseModel model{{kind, a, sigma}, {spatial, 0.125, 1.0}};
      for (const auto& p : gain_curve(model, FamilyKind::PsiKappa, grid, t, FormulaTag::Full, {}, o.threads)) {
        data.table.add_row({kind_name(kind), kind_name(spatial), std::int64_t{p.n_qubits}, t, p.tau_opt,
                            p.squeeze_opt, p.min_stddev, p.baseline_stddev, p.gain_r, p.bound});
      }
    }
  }
  return {std::move(data)};
}

// Gain of the three squeezing families without noise and under white noise.
std::vector<Panel> fig6(const FigureOptions& o) {
  const double a = o.strength;
  const double t = pick(o.total_time, 1e3) / a;
  const auto grid = even_log_grid(pick(o.n_min, 2), pick(o.n_max, 1000), pick(o.points, 12));

  Panel data{"fig6", Table({"noise", "family", "N", "T", "tau_opt", "squeeze_opt", "delta_b", "baseline_delta_b",
                            "gain_r"})};
  Panel fits{"fig6_fits", Table(fit_columns({"noise", "family", "quantity"}))};
  const std::pair<const char*, FormulaTag> settings[] = {{"none", FormulaTag::NoNoise}, {"white", FormulaTag::Full}};
  for (const auto& [noise, formula] : settings) {
    const NoiseModel model{{SpectrumKind::White, formula == FormulaTag::NoNoise ? 0.0 : a, 1.0}, {}};
    for (FamilyKind family : {FamilyKind::PsiKappa, FamilyKind::OneAxisTwisted, FamilyKind::TwoAxisTwisted}) {
      const auto g = gain_curve(model, family, grid, t, formula, {}, o.threads);
      for (const auto& p : g) {
        data.table.add_row({noise, family_name(family), std::int64_t{p.n_qubits}, t, p.tau_opt, p.squeeze_opt,
                            p.min_stddev, p.baseline_stddev, p.gain_r});
      }
      add_fit(fits.table, {noise, family_name(family), "gain_r"}, column(g, &GainPoint::gain_r), 1e2, 1e3);
    }
  }
  return {std::move(data), std::move(fits)};
}

// One qubit, slow noise (sigma = A / 1000), uncertainty versus total time.
std::vector<Panel> fig7(const FigureOptions& o) {
  const double a = o.strength;
  const double sigma = pick(o.sigma, 1e-3) * a;
  const std::vector<double> st = log_points(1e-2, 1e4, pick(o.points, 41));

  Panel data{"fig7", Table({"spectrum", "sigma_T", "T", "tau_opt", "shots", "delta_b", "bound"})};
  Panel fits{"fig7_fits", Table(fit_columns({"spectrum", "quantity"}))};
  for (SpectrumKind kind : spectra_or_all(o)) {
    const NoiseModel model{{kind, a, sigma}, {}};
    std::vector<OptimizationResult> res(st.size());
    parallel_for(st.size(), o.threads, [&](std::size_t i) { res[i] = optimize_separable(model, 1, st[i] / sigma); });
    Series s;
    for (std::size_t i = 0; i < st.size(); ++i) {
      const double t = st[i] / sigma;
      data.table.add_row({kind_name(kind), st[i], t, res[i].tau_opt, res[i].shots, res[i].min_stddev,
                          zero_freq_bound(model, 1, t)});
      s.emplace_back(t, res[i].min_stddev);
    }
    add_fit(fits.table, {kind_name(kind), "delta_b"}, s, s.front().first, s.back().first);
  }
  return {std::move(data), std::move(fits)};
}

// GHZ probes under the four spectra, sigma = A / 2, first-order form by default.
std::vector<Panel> fig8(const FigureOptions& o) {
  const double a = o.strength;
  const double sigma = pick(o.sigma, 0.5) * a;
  const double t = pick(o.total_time, 1e6) / a;
  const FormulaTag formula = o.formula.value_or(FormulaTag::GhzSimple);
  const auto grid = log_grid(pick(o.n_min, 1), pick(o.n_max, 10000), pick(o.points, 24));

  Panel data{"fig8", Table({"spectrum", "formula", "N", "T", "tau_opt", "delta_b", "delta_b_sqrt_nt",
                            "baseline_delta_b", "gain_r"})};
  Panel fits{"fig8_fits", Table(fit_columns({"spectrum", "quantity"}))};
  for (SpectrumKind kind : spectra_or_all(o)) {
    const NoiseModel model{{kind, a, sigma}, {}};
    const auto g = gain_curve(model, FamilyKind::Ghz, grid, t, formula, {}, o.threads);
    Series scaled;
    for (const auto& p : g) {
      const double x = p.min_stddev * std::sqrt(p.n_qubits * t);
      scaled.emplace_back(p.n_qubits, x);
      data.table.add_row({kind_name(kind), formula_name(formula), std::int64_t{p.n_qubits}, t, p.tau_opt,
                          p.min_stddev, x, p.baseline_stddev, p.gain_r});
    }
    add_fit(fits.table, {kind_name(kind), "delta_b"}, column(g, &GainPoint::min_stddev), 1e2, 1e4);
    add_fit(fits.table, {kind_name(kind), "delta_b_sqrt_nt"}, scaled, 1e2, 1e4);
  }
  return {std::move(data), std::move(fits)};
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig2", "fig3", "fig4", "fig6", "fig7", "fig8"};
  return ids;
}

std::vector<Panel> make_figure(std::string_view id, const FigureOptions& options) {
  if (!(options.strength > 0.0) || !std::isfinite(options.strength)) {
    throw ValidationError("figure noise strength A must be finite and > 0");
  }
  if (options.formula && id != "fig8") throw ValidationError("--formula only applies to fig8");
  if (options.formula && !is_ghz(*options.formula)) throw ValidationError("fig8 needs a GHZ formula");
  if (id == "fig2") return fig2(options);
  if (id == "fig3") return fig3(options);
  if (id == "fig4") return fig4(options);
  if (id == "fig6") return fig6(options);
  if (id == "fig7") return fig7(options);
  if (id == "fig8") return fig8(options);
  throw ValidationError("unknown figure id '" + std::string(id) + "'");
}

}  // namespace corrsense::cli
