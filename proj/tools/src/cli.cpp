#include "corrsense_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "corrsense/error.hpp"
#include "corrsense/optimizer.hpp"
#include "corrsense/uncertainty.hpp"
#include "corrsense_cli/figures.hpp"
#include "corrsense_cli/mc_grid.hpp"
#include "corrsense_cli/table.hpp"

namespace corrsense::cli {

namespace {

class StatisticalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Shared {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  int threads = 0;
};

struct NoiseFlags {
  std::string noise = "white";
  double a = 1.0;
  double sigma = 1.0;
  std::string spatial = "trivial";
  double b = 1.0;
  double k0 = 1.0;

  NoiseModel model() const {
    NoiseModel m;
    m.temporal = {parse_kind(noise), a, sigma};
    if (spatial != "trivial") m.spatial = {parse_kind(spatial), b, k0};
    m.validate();
    return m;
  }
};

struct StateFlags {
  std::string family = "separable";
  std::optional<double> kappa;
  std::optional<double> chi_t;
  double total_time = 1000.0;
  std::string formula = "full";
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--seed", s.seed, "Seed for all random draws")->capture_default_str();
  cmd->add_option("--out", s.out, "Output file (figure: output directory)");
  cmd->add_option("--format", s.format, "csv or json")->capture_default_str();
  cmd->add_option("--threads", s.threads, "Worker threads, 0 for all cores")->capture_default_str();
}

void add_noise(CLI::App* cmd, NoiseFlags& f) {
  cmd->add_option("--noise", f.noise, "Temporal spectrum: white, gaussian, linear, ohmic")->capture_default_str();
  cmd->add_option("--A", f.a, "Temporal noise strength")->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "Temporal cutoff frequency")->capture_default_str();
  cmd->add_option("--spatial", f.spatial, "Spatial spectrum, or trivial for none")->capture_default_str();
  cmd->add_option("--B", f.b, "Spatial noise strength")->capture_default_str();
  cmd->add_option("--k0", f.k0, "Spatial cutoff")->capture_default_str();
}

void add_state(CLI::App* cmd, StateFlags& f) {
  cmd->add_option("--family", f.family, "separable, psi, oat, tat or ghz")->capture_default_str();
  cmd->add_option("--kappa", f.kappa, "Squeezing parameter of the psi family");
  cmd->add_option("--chi-t", f.chi_t, "Twisting strength of the oat and tat families");
  cmd->add_option("--T", f.total_time, "Total sensing time")->capture_default_str();
  cmd->add_option("--formula", f.formula,
                  "full, temporal, simplified, spatial-approx, no-noise, markovian, ghz-exact, ghz-simple")
      ->capture_default_str();
}

FamilyKind parse_family(const std::string& name) {
  if (name == "separable" || name == "coherent") return FamilyKind::Coherent;
  if (name == "psi") return FamilyKind::PsiKappa;
  if (name == "oat") return FamilyKind::OneAxisTwisted;
  if (name == "tat") return FamilyKind::TwoAxisTwisted;
  if (name == "ghz") return FamilyKind::Ghz;
  throw ValidationError("family must be separable, psi, oat, tat or ghz, got '" + name + "'");
}

// Family with its parameter for direct evaluation.
SqueezingFamily state_family(const StateFlags& f) {
  const FamilyKind kind = parse_family(f.family);
  if (f.kappa && kind != FamilyKind::PsiKappa) throw ValidationError("kappa only applies to --family psi");
  if (f.chi_t && kind != FamilyKind::OneAxisTwisted && kind != FamilyKind::TwoAxisTwisted) {
    throw ValidationError("chi-t only applies to --family oat or tat");
  }
  SqueezingFamily fam{kind, 0.0};
  if (kind == FamilyKind::PsiKappa) {
    if (!f.kappa) throw ValidationError("kappa is required for --family psi");
    fam.parameter = *f.kappa;
  } else if (fam.has_parameter()) {
    if (!f.chi_t) throw ValidationError("chi-t is required for --family " + f.family);
    fam.parameter = *f.chi_t;
  }
  fam.validate();
  return fam;
}

// GHZ probes use the GHZ evaluators; the first-order forms map to the
// first-order GHZ expression.
FormulaTag effective_formula(FormulaTag tag, FamilyKind family) {
  if (family != FamilyKind::Ghz) {
    if (is_ghz(tag)) throw ValidationError("formula " + std::string(formula_name(tag)) + " requires --family ghz");
    return tag;
  }
  if (tag == FormulaTag::Simplified || tag == FormulaTag::SpatialApprox || tag == FormulaTag::GhzSimple) {
    return FormulaTag::GhzSimple;
  }
  return FormulaTag::GhzExact;
}

std::ostream& open_output(const Shared& s, std::ostream& out, std::ofstream& file) {
  if (s.out.empty()) return out;
  file.open(s.out, std::ios::binary);
  if (!file) throw ValidationError("cannot open output file '" + s.out + "'");
  return file;
}

void emit(const Table& table, const Shared& s, std::ostream& out) {
  const Format format = parse_format(s.format);
  std::ofstream file;
  write_table(open_output(s, out, file), table, format);
}

void emit_panels(const std::vector<Panel>& panels, const Shared& s, std::ostream& out) {
  const Format format = parse_format(s.format);
  if (s.out.empty()) {
    for (const Panel& p : panels) {
      out << "# " << p.name << '\n';
      write_table(out, p.table, format);
    }
    return;
  }
  std::filesystem::create_directories(s.out);
  for (const Panel& p : panels) {
    const auto path = std::filesystem::path(s.out) / (p.name + "." + format_extension(format));
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ValidationError("cannot open output file '" + path.string() + "'");
    write_table(file, p.table, format);
  }
}

void cmd_eval(const NoiseFlags& nf, const StateFlags& sf, int n, double tau, double theta, const Shared& s,
              std::ostream& out) {
  NoiseModel model = nf.model();
  const SqueezingFamily family = state_family(sf);
  const FormulaTag tag = effective_formula(parse_formula(sf.formula), family.kind);
  if (family.kind == FamilyKind::Ghz && parse_formula(sf.formula) == FormulaTag::NoNoise) {
    model.temporal.strength = 0.0;
  }
  const ProtocolParams p = ProtocolParams::make(n, sf.total_time, tau, theta);
  const NoiseKernel kernel(model, n);
  const SpinMoments m = family.kind == FamilyKind::Ghz ? SpinMoments{} : family_moments(n, family);
  const UncertaintyBreakdown b = evaluate(tag, m, kernel, p);

  Table t({"family", "formula", "N", "T", "tau", "shots", "theta", "shot_noise", "single_shot_dephasing",
           "cross_shot", "cross_qubit", "variance", "stddev", "bound"});
  t.add_row({family_name(family.kind), formula_name(b.formula), std::int64_t{n}, p.total_time, p.tau, p.shots,
             p.theta, b.shot_noise, b.single_shot_dephasing, b.cross_shot, b.cross_qubit, b.total_variance,
             b.total_stddev, b.fundamental_bound});
  emit(t, s, out);
}

void cmd_optimize(const NoiseFlags& nf, const StateFlags& sf, std::vector<int> ns, const Shared& s,
                  std::ostream& out) {
  const NoiseModel model = nf.model();
  const FamilyKind family = parse_family(sf.family);
  if (sf.kappa || sf.chi_t) throw ValidationError("optimize chooses the squeezing parameter; drop kappa/chi-t");
  const FormulaTag tag = parse_formula(sf.formula);
  const FormulaTag shown = effective_formula(tag, family);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty() || ns.front() < 1) throw ValidationError("N must be >= 1");

  const auto g = gain_curve(model, family, ns, sf.total_time, tag, {}, s.threads);
  Table t({"family", "formula", "N", "T", "tau_opt", "squeeze_opt", "shots", "delta_b", "baseline_delta_b",
           "baseline_tau", "gain_r", "bound"});
  for (const auto& p : g) {
    const std::int64_t shots = ProtocolParams::make(p.n_qubits, sf.total_time, p.tau_opt).shots;
    t.add_row({family_name(family), formula_name(shown), std::int64_t{p.n_qubits}, sf.total_time, p.tau_opt,
               p.squeeze_opt, shots, p.min_stddev, p.baseline_stddev, p.baseline_tau, p.gain_r, p.bound});
  }
  emit(t, s, out);
}

void cmd_bound(const NoiseFlags& nf, const StateFlags& sf, int n, const Shared& s, std::ostream& out) {
  const NoiseModel model = nf.model();
  const FamilyKind family = parse_family(sf.family);
  const FormulaTag tag = parse_formula(sf.formula);
  const OptimizationResult r = optimize_protocol(model, family, n, sf.total_time, tag);
  const double bound = zero_freq_bound(model, n, sf.total_time);
  const double ratio = bound > 0.0 ? r.min_stddev / bound : HUGE_VAL;

  Table t({"temporal", "spatial", "family", "N", "T", "S0", "G0", "bound", "optimized_delta_b", "ratio"});
  t.add_row({nf.noise, nf.spatial, family_name(family), std::int64_t{n}, sf.total_time,
             spectrum_value(model.temporal, 0.0), spatial_spectrum_value(model.spatial, 0.0), bound, r.min_stddev,
             ratio});
  emit(t, s, out);
}

void cmd_mc(const NoiseFlags& nf, const std::string& grid, std::int64_t trajectories, const std::string& slope,
            const Shared& s, std::ostream& out, std::ostream& err) {
  McOptions options;
  options.threads = s.threads;
  if (slope == "analytic") {
    options.slope = SlopeMode::Analytic;
  } else if (slope == "empirical") {
    options.slope = SlopeMode::Empirical;
  } else {
    throw ValidationError("slope must be analytic or empirical, got '" + slope + "'");
  }
  const McReport report = run_mc_grid(mc_grid(grid, nf.model()), trajectories, s.seed, options);
  emit(report.table, s, out);
  if (report.max_abs_z > 4.0) {
    err << "mc-validate: max |z| = " << format_real(report.max_abs_z) << " exceeds 4\n";
    throw StatisticalFailure("statistical validation failed");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ramsey spectroscopy uncertainty under correlated dephasing", "corrsense"};
  app.set_config("--config", "", "TOML file; sections name subcommands, flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  Shared shared;
  NoiseFlags noise;
  StateFlags state;
  int n = 100;
  double tau = 0.0;
  double theta = 0.0;
  std::vector<int> ns{100};

  CLI::App* eval = app.add_subcommand("eval", "Variance breakdown for one configuration");
  add_shared(eval, shared);
  add_noise(eval, noise);
  add_state(eval, state);
  eval->add_option("--N", n, "Number of qubits")->capture_default_str();
  eval->add_option("--tau", tau, "Shot duration")->required();
  eval->add_option("--theta", theta, "Operating-point offset")->capture_default_str();

  CLI::App* opt = app.add_subcommand("optimize", "Optimize tau and the squeezing parameter");
  add_shared(opt, shared);
  add_noise(opt, noise);
  add_state(opt, state);
  opt->add_option("--N", ns, "Number of qubits; several values give one row each")->delimiter(',');

  FigureOptions fig;
  std::string figure_id;
  std::vector<std::string> spectra;
  std::optional<std::string> fig_formula;
  CLI::App* figure = app.add_subcommand("figure", "Data behind one figure");
  add_shared(figure, shared);
  figure->add_option("id", figure_id, "fig2, fig3, fig4, fig6, fig7 or fig8")->required();
  figure->add_option("--n-min", fig.n_min, "Smallest N");
  figure->add_option("--n-max", fig.n_max, "Largest N");
  figure->add_option("--points", fig.points, "Grid points per sweep");
  figure->add_option("--T", fig.total_time, "Total time in units of 1/A");
  figure->add_option("--A", fig.strength, "Temporal noise strength")->capture_default_str();
  figure->add_option("--sigma", fig.sigma, "Temporal cutoff in units of A");
  figure->add_option("--spectra", spectra, "Subset of temporal spectra")->delimiter(',');
  figure->add_option("--formula", fig_formula, "GHZ formula for fig8");

  std::string grid = "default";
  std::int64_t trajectories = 10000;
  std::string slope = "analytic";
  CLI::App* mc = app.add_subcommand("mc-validate", "Monte Carlo check of the closed forms");
  add_shared(mc, shared);
  add_noise(mc, noise);
  mc->add_option("--grid", grid, "default, zero-noise or acceptance")->capture_default_str();
  mc->add_option("--trajectories", trajectories, "Trajectories per configuration")->capture_default_str();
  mc->add_option("--slope", slope, "analytic or empirical")->capture_default_str();

  CLI::App* bound = app.add_subcommand("bound", "Zero-frequency bound and the optimized uncertainty");
  add_shared(bound, shared);
  add_noise(bound, noise);
  add_state(bound, state);
  bound->add_option("--N", n, "Number of qubits")->capture_default_str();

  for (CLI::App* cmd : {eval, opt, figure, mc, bound}) cmd->allow_config_extras(CLI::config_extras_mode::error);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*eval) {
      cmd_eval(noise, state, n, tau, theta, shared, out);
    } else if (*opt) {
      cmd_optimize(noise, state, ns, shared, out);
    } else if (*figure) {
      for (const auto& s : spectra) fig.spectra.push_back(parse_kind(s));
      if (fig_formula) fig.formula = parse_formula(*fig_formula);
      fig.threads = shared.threads;
      parse_format(shared.format);
      emit_panels(make_figure(figure_id, fig), shared, out);
    } else if (*mc) {
      cmd_mc(noise, grid, trajectories, slope, shared, out, err);
    } else if (*bound) {
      cmd_bound(noise, state, n, shared, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const StatisticalFailure&) {
    return kStatistical;
  }
  return kOk;
}

}  // namespace corrsense::cli
