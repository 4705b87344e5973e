#include "corrsense/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "corrsense/error.hpp"
#include "corrsense/parallel.hpp"

namespace corrsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SpinMoments lerp(const SpinMoments& a, const SpinMoments& b, double w) {
  auto mix = [w](double x, double y) { return x + w * (y - x); };
  return {mix(a.jz_mean, b.jz_mean), mix(a.jy2_mean, b.jy2_mean), mix(a.jz2_mean, b.jz2_mean),
          mix(a.jy_var, b.jy_var), mix(a.jz_var, b.jz_var)};
}

// Moments as a function of the squeezing parameter.
class MomentSource {
 public:
  MomentSource(FamilyKind kind, int n, const OptimizerOptions& o) : kind_(kind), n_(n), twisting_(o.twisting) {
    switch (kind) {
      case FamilyKind::PsiKappa:
        lo_ = std::min(std::max(2.0 / n, 1e-3), 1.0);
        hi_ = 1.0;
        break;
      case FamilyKind::OneAxisTwisted:
        lo_ = 1e-5;
        hi_ = 0.5 * std::numbers::pi;
        break;
      case FamilyKind::TwoAxisTwisted: {
        const double max_chi = std::min(0.5 * std::numbers::pi, 4.0 * std::log(4.0 * n) / n + 0.05);
        const long steps = static_cast<long>(std::ceil(max_chi / std::min(1e-3 / n, max_chi / 100.0)));
        const int every = static_cast<int>(std::max(1L, steps / 4000));
        trajectory_ = tat_trajectory(n, max_chi, true, every, o.twisting);
        if (trajectory_.size() < 3) throw NumericalError("two-axis twisting trajectory is too short");
        lo_ = trajectory_[1].chi_t;
        hi_ = trajectory_.back().chi_t;
        break;
      }
      case FamilyKind::Coherent:
      case FamilyKind::Ghz:
        break;
    }
    if (o.squeeze_lo > 0.0) lo_ = std::max(lo_, o.squeeze_lo);
    if (o.squeeze_hi > 0.0) hi_ = std::min(hi_, o.squeeze_hi);
    if (has_parameter() && !(lo_ <= hi_)) throw ValidationError("empty squeezing-parameter range");
  }

  bool has_parameter() const {
    return kind_ == FamilyKind::PsiKappa || kind_ == FamilyKind::OneAxisTwisted ||
           kind_ == FamilyKind::TwoAxisTwisted;
  }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  SpinMoments at(double s) {
    if (cached_ && s == cached_s_) return cached_m_;
    SpinMoments m;
    switch (kind_) {
      case FamilyKind::Coherent: m = separable_moments(n_); break;
      case FamilyKind::PsiKappa: m = spin_moments(make_psi_kappa(n_, std::min(s, 1.0))); break;
      case FamilyKind::OneAxisTwisted: m = oat_moments(n_, s); break;
      case FamilyKind::TwoAxisTwisted: {
        auto it = std::lower_bound(trajectory_.begin(), trajectory_.end(), s,
                                   [](const TwistSample& t, double v) { return t.chi_t < v; });
        if (it == trajectory_.begin()) {
          m = it->moments;
        } else if (it == trajectory_.end()) {
          m = trajectory_.back().moments;
        } else {
          const auto& a = *(it - 1);
          m = lerp(a.moments, it->moments, (s - a.chi_t) / (it->chi_t - a.chi_t));
        }
        break;
      }
      case FamilyKind::Ghz: break;
    }
    cached_ = true;
    cached_s_ = s;
    cached_m_ = m;
    return m;
  }

 private:
  FamilyKind kind_;
  int n_;
  TwistingOptions twisting_;
  double lo_ = 1.0, hi_ = 1.0;
  std::vector<TwistSample> trajectory_;
  bool cached_ = false;
  double cached_s_ = 0.0;
  SpinMoments cached_m_;
};

struct Point {
  double u = 0.0;  // log10 tau
  double v = 0.0;  // log10 parameter
  double f = kInf;
};

// Strictly better, with ties broken towards smaller tau, then larger parameter.
bool better(const Point& a, const Point& b) {
  if (!std::isfinite(b.f)) return std::isfinite(a.f);
  if (!std::isfinite(a.f)) return false;
  const double tol = 1e-12 * std::max(std::abs(a.f), std::abs(b.f));
  if (a.f < b.f - tol) return true;
  if (a.f > b.f + tol) return false;
  if (a.u != b.u) return a.u < b.u;
  return a.v > b.v;
}

class Objective {
 public:
  Objective(const NoiseModel& model, FamilyKind family, int n, double total_time, FormulaTag formula,
            const OptimizerOptions& options)
      : kernel_(model, n), source_(family, n, options), n_(n), total_time_(total_time), formula_(formula) {}

  MomentSource& source() { return source_; }

  double operator()(double u, double v) {
    const double tau = std::pow(10.0, u);
    try {
      const ProtocolParams p = ProtocolParams::make(n_, total_time_, tau);
      SpinMoments m;
      if (!is_ghz(formula_)) {
        m = source_.at(std::pow(10.0, v));
        if (!(m.jz_mean > 1e-300)) {
          ++skipped_;
          return kInf;
        }
      }
      const double s = evaluate(formula_, m, kernel_, p).total_stddev;
      ++evaluations_;
      if (!std::isfinite(s)) {
        ++skipped_;
        return kInf;
      }
      return s;
    } catch (const NumericalError&) {
      ++skipped_;
      return kInf;
    }
  }

  UncertaintyBreakdown breakdown(const Point& pt, SpinMoments& m) {
    const ProtocolParams p = ProtocolParams::make(n_, total_time_, std::pow(10.0, pt.u));
    if (!is_ghz(formula_)) m = source_.at(std::pow(10.0, pt.v));
    return evaluate(formula_, m, kernel_, p);
  }

  std::int64_t evaluations() const { return evaluations_; }
  std::int64_t skipped() const { return skipped_; }

 private:
  NoiseKernel kernel_;
  MomentSource source_;
  int n_;
  double total_time_;
  FormulaTag formula_;
  std::int64_t evaluations_ = 0;
  std::int64_t skipped_ = 0;
};

// Golden-section search of g on [a, b]; returns the best point seen.
template <class G>
std::pair<double, double> golden(G&& g, double a, double b, double xtol) {
  constexpr double r = 0.6180339887498949;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = g(c), fd = g(d);
  while (b - a > xtol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = g(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct Box {
  double u_lo, u_hi, v_lo, v_hi;
  bool two_d;
};

constexpr double kXtol = 1e-7;

// Line search of f along p + t * dir, t in [t_lo, t_hi], with the bracket
// shifted outwards while the minimum sits on an interior edge.
Point line_search(Objective& obj, const Box& box, Point p, double du, double dv, double t_lo, double t_hi) {
  auto clamp_t = [&](double t) {
    double lo = -kInf, hi = kInf;
    auto limit = [&](double x, double d, double xl, double xh) {
      if (d > 0) {
        lo = std::max(lo, (xl - x) / d);
        hi = std::min(hi, (xh - x) / d);
      } else if (d < 0) {
        lo = std::max(lo, (xh - x) / d);
        hi = std::min(hi, (xl - x) / d);
      }
    };
    limit(p.u, du, box.u_lo, box.u_hi);
    limit(p.v, dv, box.v_lo, box.v_hi);
    return std::pair{std::max(t, lo), std::min(t, hi)};
  };
  const double scale = std::max(std::abs(du), std::abs(dv));
  if (scale == 0.0) return p;
  double a = clamp_t(t_lo).first, b = clamp_t(t_hi).second;
  Point best = p;
  for (int expand = 0; expand < 40 && a < b; ++expand) {
    auto g = [&](double t) { return obj(p.u + t * du, p.v + t * dv); };
    const auto [t, f] = golden(g, a, b, kXtol / scale);
    const Point cand{p.u + t * du, p.v + t * dv, f};
    if (better(cand, best)) best = cand;
    const double width = b - a;
    const double lo_lim = clamp_t(-kInf).first, hi_lim = clamp_t(kInf).second;
    if (t - a < 0.01 * width && a > lo_lim) {
      b = a + 0.1 * width;
      a = std::max(lo_lim, a - width);
    } else if (b - t < 0.01 * width && b < hi_lim) {
      a = b - 0.1 * width;
      b = std::min(hi_lim, b + width);
    } else {
      break;
    }
  }
  return best;
}

}  // namespace

std::vector<int> log_grid(int lo, int hi, int count) {
  if (lo < 1 || hi < lo || count < 1) throw ValidationError("invalid log grid");
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1));
    const int v = std::clamp(static_cast<int>(std::lround(x)), lo, hi);
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

std::vector<int> even_log_grid(int lo, int hi, int count) {
  if (lo < 2 || hi < lo || count < 1) throw ValidationError("invalid even log grid");
  const int elo = lo + (lo % 2), ehi = hi - (hi % 2);
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? elo : std::exp(std::log(elo) + (std::log(ehi) - std::log(elo)) * i / (count - 1));
    const int v = std::clamp(2 * static_cast<int>(std::lround(0.5 * x)), elo, ehi);
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

OptimizationResult optimize_protocol(const NoiseModel& model, FamilyKind family, int n_qubits,
                                     double total_time, FormulaTag formula, const OptimizerOptions& options) {
  model.validate();
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
  if (!(total_time > 0.0) || !std::isfinite(total_time)) throw ValidationError("total_time must be finite and > 0");
  if (options.tau_grid < 2 || options.squeeze_grid < 2) throw ValidationError("grids need at least 2 points");

  NoiseModel effective = model;
  if (family == FamilyKind::Ghz) {
    if (formula == FormulaTag::NoNoise) effective.temporal.strength = 0.0;
    formula = (formula == FormulaTag::Simplified || formula == FormulaTag::SpatialApprox ||
               formula == FormulaTag::GhzSimple)
                  ? FormulaTag::GhzSimple
                  : FormulaTag::GhzExact;
  } else if (is_ghz(formula)) {
    throw ValidationError("GHZ formulas require the ghz family");
  }
  if (formula == FormulaTag::NoNoise) effective.temporal.strength = 0.0;

  // Default tau range in units of the noise time scale 1 / A.
  const double a = effective.temporal.strength;
  double tau_lo, tau_hi;
  if (a > 0.0) {
    tau_lo = 1e-4 / a;
    if (family == FamilyKind::Ghz) tau_lo /= n_qubits;
    tau_hi = 1e2 / a;
  } else {
    tau_lo = 1e-6 * total_time;
    tau_hi = total_time;
  }
  if (options.tau_lo > 0.0) tau_lo = options.tau_lo;
  if (options.tau_hi > 0.0) tau_hi = options.tau_hi;
  tau_hi = std::min(tau_hi, total_time);
  tau_lo = std::max(tau_lo, 1e-11 * total_time);
  if (!(tau_lo < tau_hi)) tau_lo = tau_hi;

  Objective obj(effective, family, n_qubits, total_time, formula, options);
  const bool two_d = obj.source().has_parameter();
  Box box{std::log10(tau_lo), std::log10(tau_hi), 0.0, 0.0, two_d};
  if (two_d) {
    box.v_lo = std::log10(obj.source().lo());
    box.v_hi = std::log10(obj.source().hi());
  }

  // Coarse grid, parameter-major so that moments are built once per value.
  const int nu = two_d ? options.tau_grid : 4 * options.tau_grid;
  const int nv = two_d ? options.squeeze_grid : 1;
  auto grid_u = [&](int i) { return box.u_lo + (box.u_hi - box.u_lo) * i / (nu - 1); };
  auto grid_v = [&](int j) { return nv == 1 ? box.v_hi : box.v_lo + (box.v_hi - box.v_lo) * j / (nv - 1); };
  std::vector<Point> grid(static_cast<std::size_t>(nu) * nv);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      Point& pt = grid[static_cast<std::size_t>(j) * nu + i];
      pt = {grid_u(i), grid_v(j), 0.0};
      pt.f = obj(pt.u, pt.v);
    }
  }
  auto at = [&](int i, int j) -> const Point& { return grid[static_cast<std::size_t>(j) * nu + i]; };

  Point grid_best;
  std::vector<Point> minima;
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const Point& pt = at(i, j);
      if (better(pt, grid_best)) grid_best = pt;
      if (!std::isfinite(pt.f)) continue;
      bool local = true;
      for (auto [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || ii >= nu || jj < 0 || jj >= nv) continue;
        if (better(at(ii, jj), pt)) local = false;
      }
      if (local) minima.push_back(pt);
    }
  }
  if (!std::isfinite(grid_best.f)) {
    throw NumericalError("objective is not finite anywhere on the search grid");
  }
  std::sort(minima.begin(), minima.end(), better);
  if (minima.empty()) minima.push_back(grid_best);
  if (static_cast<int>(minima.size()) > options.starts) minima.resize(static_cast<std::size_t>(options.starts));

  const double du = nu > 1 ? (box.u_hi - box.u_lo) / (nu - 1) : 1.0;
  const double dv = nv > 1 ? (box.v_hi - box.v_lo) / (nv - 1) : 0.0;

  Point best = grid_best;
  bool converged = false;
  for (const Point& start : minima) {
    Point cur = start;
    bool start_converged = false;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      const Point before = cur;
      cur = line_search(obj, box, cur, du, 0.0, -1.0, 1.0);
      if (two_d) {
        cur = line_search(obj, box, cur, 0.0, dv, -1.0, 1.0);
        // Move along the net displacement of this sweep to follow valleys.
        const double mu = cur.u - before.u, mv = cur.v - before.v;
        if (mu != 0.0 || mv != 0.0) cur = line_search(obj, box, cur, mu, mv, -1.0, 2.0);
      }
      const double gain = before.f - cur.f;
      if (!two_d || gain <= options.rel_tol * std::abs(cur.f)) {
        start_converged = true;
        break;
      }
    }
    if (better(cur, best)) {
      best = cur;
      converged = start_converged;
    } else if (&start == &minima.front()) {
      converged = start_converged;
    }
  }

  OptimizationResult r;
  r.breakdown = obj.breakdown(best, r.moments);
  r.tau_opt = ProtocolParams::make(n_qubits, total_time, std::pow(10.0, best.u)).tau;
  r.shots = ProtocolParams::make(n_qubits, total_time, r.tau_opt).shots;
  if (two_d) r.squeeze_opt = std::pow(10.0, best.v);
  r.min_stddev = r.breakdown.total_stddev;
  r.evaluations = obj.evaluations();
  r.skipped = obj.skipped();
  r.converged = converged;
  return r;
}

OptimizationResult optimize_separable(const NoiseModel& model, int n_qubits, double total_time,
                                      FormulaTag formula, const OptimizerOptions& options) {
  if (is_ghz(formula)) formula = FormulaTag::Full;
  return optimize_protocol(model, FamilyKind::Coherent, n_qubits, total_time, formula, options);
}

OptimizationResult optimize_with_gain(const NoiseModel& model, FamilyKind family, int n_qubits,
                                      double total_time, FormulaTag formula, const OptimizerOptions& options) {
  OptimizationResult r = optimize_protocol(model, family, n_qubits, total_time, formula, options);
  FormulaTag base = formula;
  if (family == FamilyKind::Ghz && base != FormulaTag::NoNoise) base = FormulaTag::Full;
  const OptimizationResult sep = optimize_separable(model, n_qubits, total_time, base, options);
  r.gain_r = sep.min_stddev / r.min_stddev;
  return r;
}

std::vector<GainPoint> gain_curve(const NoiseModel& model, FamilyKind family, const std::vector<int>& n_grid,
                                  double total_time, FormulaTag formula, const OptimizerOptions& options,
                                  int threads) {
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw ValidationError("n_grid must be strictly increasing");
  }
  std::vector<GainPoint> out(n_grid.size());
  parallel_for(n_grid.size(), threads, [&](std::size_t i) {
    const int n = n_grid[i];
    const OptimizationResult r = optimize_protocol(model, family, n, total_time, formula, options);
    FormulaTag base = formula;
    if (family == FamilyKind::Ghz && base != FormulaTag::NoNoise) base = FormulaTag::Full;
    const OptimizationResult sep = family == FamilyKind::Coherent
                                       ? r
                                       : optimize_separable(model, n, total_time, base, options);
    GainPoint g;
    g.n_qubits = n;
    g.tau_opt = r.tau_opt;
    g.squeeze_opt = r.squeeze_opt.value_or(std::numeric_limits<double>::quiet_NaN());
    g.min_stddev = r.min_stddev;
    g.baseline_stddev = sep.min_stddev;
    g.baseline_tau = sep.tau_opt;
    g.gain_r = sep.min_stddev / r.min_stddev;
    g.bound = zero_freq_bound(model, n, total_time);
    out[i] = g;
  });
  return out;
}

ScalingFit scaling_exponent(const std::vector<std::pair<double, double>>& points, double n_min, double n_max) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [n, v] : points) {
    if (n < n_min || n > n_max) continue;
    if (!(v > 0.0) || !(n > 0.0)) throw ValidationError("scaling fit needs positive N and values");
    logs.emplace_back(std::log(n), std::log(v));
  }
  if (logs.size() < 5) {
    throw ValidationError("scaling fit needs at least 5 points in the window, got " + std::to_string(logs.size()));
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= logs.size();
  my /= logs.size();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw ValidationError("scaling fit needs at least two distinct N");
  ScalingFit fit;
  fit.n_min = n_min;
  fit.n_max = n_max;
  fit.points = logs.size();
  if (syy <= 1e-30 * std::max(1.0, my * my)) {
    fit.degenerate = true;
    fit.exponent = 0.0;
    fit.intercept = my;
    fit.r_squared = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r_squared = sxy * sxy / (sxx * syy);
  return fit;
}

}  // namespace corrsense
