#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmcmc/chain.hpp"
#include "qmcmc/error.hpp"
#include "qmcmc/problems.hpp"
#include "qmcmc/quantum.hpp"
#include "qmcmc/schedule.hpp"

namespace qmcmc {

inline const std::vector<double>& default_alpha_grid() {
  static const std::vector<double> grid{0, 0.5, 1, 2, 3, 4, 6, 8, 12, 16};
  return grid;
}

/// n log-uniform points on [lo, hi], endpoints included.
inline std::vector<double> log_grid(double lo, double hi, int n) {
  require(lo > 0.0 && hi > lo && n >= 2, "log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> default_kappa_grid() { return log_grid(1e2, 1e5, 64); }

// ---------------------------------------------------------------------------
// Work distribution

/// QMCMC_THREADS if set and positive, else the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("QMCMC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// out[i] = fn(i) for i in [0, n). Results land at their own index, so the
/// output does not depend on scheduling. The first exception is rethrown.
template <typename Fn>
auto parallel_map(std::size_t n, Fn&& fn, int threads = 0) {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  if (threads <= 0) threads = default_thread_count();
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i; !failed && (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// ---------------------------------------------------------------------------
// Per-instance gaps

/// Plateau mode: empty = large-kappa time average, else a fixed kappa.
using KappaMode = std::optional<double>;

struct GapRecord {
  std::uint64_t seed = 0;
  double alpha = 0.0;
  KappaMode kappa;
  double delta = 0.0;
  double lambda2 = 0.0;
  double db_residual = 0.0;
  double stationarity_residual = 0.0;
  bool ok = true;
  std::string error;
};

struct GapScanParams {
  double beta = 5.0;
  double h = 1.5;
  RampKind kind = RampKind::Sin2;
  std::vector<double> alphas = default_alpha_grid();
  KappaMode kappa;
  int steps_per_unit_time = kDefaultStepsPerUnitTime;
};

inline RampSchedule schedule_for(RampKind kind, double alpha, const KappaMode& kappa) {
  if (kind == RampKind::Quench) require(alpha == 0.0, "schedule: a quench has alpha = 0");
  return RampSchedule::make(kind, alpha, kappa);
}

/// Gap of the Metropolis chain with the dressed proposal at every alpha of
/// `p` for one instance. The plateau diagonalisation is shared across alpha.
/// A numerical failure marks the affected record instead of throwing.
inline std::vector<GapRecord> instance_gaps(const ClassicalHamiltonian& hc, const GapScanParams& p) {
  require_dense_size(hc.sites(), "instance_gaps");
  require(std::isfinite(p.beta) && p.beta >= 0.0, "instance_gaps: beta must be finite and >= 0");
  require(std::isfinite(p.h) && p.h > 0.0, "instance_gaps: h must be > 0");
  const auto table = energy_table(hc);
  const auto target = boltzmann(table, p.beta);
  std::vector<GapRecord> out;
  out.reserve(p.alphas.size());
  std::optional<PlateauSpectrum> spec;
  for (double alpha : p.alphas) {
    GapRecord r;
    r.seed = hc.seed().value_or(0);
    r.alpha = alpha;
    r.kappa = p.kappa;
    try {
      const auto sched = schedule_for(p.kind, alpha, p.kappa);
      if (!spec) spec = diagonalize_plateau(plateau_hamiltonian(table, hc.sites(), p.h));
      const auto u1 = ramp_propagator(table, hc.sites(), p.h, sched, p.steps_per_unit_time);
      const auto overlaps = plateau_overlaps(u1, *spec);
      const auto q = p.kappa ? proposal_finite_kappa(overlaps, *spec, *p.kappa)
                             : proposal_time_averaged(overlaps, *spec);
      const auto g = spectral_gap(metropolis_transition(q, target));
      r.delta = g.delta;
      r.lambda2 = g.lambda2;
      r.db_residual = g.detailed_balance_residual;
      r.stationarity_residual = g.stationarity_residual;
    } catch (const NumericalError& e) {
      r.ok = false;
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Disorder averages

struct GapPoint {
  double alpha = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};

struct GapCurve {
  Model model = Model::SK;
  int sites = 0;
  double beta = 0.0;
  double h = 0.0;
  RampKind kind = RampKind::Sin2;
  KappaMode kappa;
  std::vector<GapPoint> points;
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};

/// Sample mean and standard error of the mean (0 for a single value).
inline MeanStderr mean_stderr(const std::vector<double>& v) {
  MeanStderr m;
  m.count = static_cast<int>(v.size());
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return m;
}

/// Pure aggregation of per-instance records into a curve; failed records are
/// skipped and the per-point count reflects what remains.
inline std::vector<GapPoint> aggregate(const std::vector<GapRecord>& records) {
  std::map<double, std::vector<double>> by_alpha;
  for (const auto& r : records) {
    auto& v = by_alpha[r.alpha];
    if (r.ok) v.push_back(r.delta);
  }
  std::vector<GapPoint> pts;
  for (const auto& [alpha, v] : by_alpha) {
    const auto m = mean_stderr(v);
    pts.push_back({alpha, m.mean, m.stderr_, m.count});
  }
  return pts;
}

using LogSink = std::function<void(const std::string&)>;

inline void log_to_stderr(const std::string& line) { std::cerr << line << '\n'; }

struct DisorderScan {
  GapCurve curve;
  std::vector<GapRecord> records;  // sorted by (seed index, alpha)
};

inline DisorderScan disorder_scan(const DisorderSpec& spec, const GapScanParams& p,
                                  int threads = 0, const LogSink& log = log_to_stderr) {
  require(spec.instances >= 2, "disorder_scan: need at least 2 instances");
  require_dense_size(spec.sites, "disorder_scan");
  require(!p.alphas.empty(), "disorder_scan: empty alpha grid");
  for (std::size_t i = 1; i < p.alphas.size(); ++i)
    require(p.alphas[i] > p.alphas[i - 1], "disorder_scan: alpha grid must be strictly increasing");

  const auto per_instance = parallel_map(
      static_cast<std::size_t>(spec.instances),
      [&](std::size_t i) { return instance_gaps(spec.instance(static_cast<int>(i)), p); }, threads);

  DisorderScan out;
  out.curve = {spec.model, spec.sites, p.beta, p.h, p.kind, p.kappa, {}};
  for (const auto& recs : per_instance)
    for (const auto& r : recs) {
      if (!r.ok && log)
        log("instance seed " + std::to_string(r.seed) + " alpha " + std::to_string(r.alpha) +
            " excluded: " + r.error);
      out.records.push_back(r);
    }
  out.curve.points = aggregate(out.records);
  return out;
}

// ---------------------------------------------------------------------------
// Plateau-duration scans

struct KappaScan {
  std::vector<std::pair<double, double>> gaps;  // (kappa, delta)
  double large_kappa_gap = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline KappaScan kappa_scan(const ClassicalHamiltonian& hc, double beta, double h, RampKind kind,
                            double alpha, const std::vector<double>& kappas = default_kappa_grid(),
                            int steps_per_unit_time = kDefaultStepsPerUnitTime) {
  require(!kappas.empty(), "kappa_scan: empty kappa grid");
  for (double k : kappas) require(k > 0.0 && std::isfinite(k), "kappa_scan: kappa must be > 0");
  const auto table = energy_table(hc);
  const auto target = boltzmann(table, beta);
  const auto spec = diagonalize_plateau(plateau_hamiltonian(table, hc.sites(), h));
  const auto sched = schedule_for(kind, alpha, std::nullopt);
  const auto overlaps =
      plateau_overlaps(ramp_propagator(table, hc.sites(), h, sched, steps_per_unit_time), spec);

  KappaScan out;
  out.large_kappa_gap =
      spectral_gap(metropolis_transition(proposal_time_averaged(overlaps, spec), target)).delta;
  std::vector<double> deltas;
  for (double k : kappas) {
    const double d =
        spectral_gap(metropolis_transition(proposal_finite_kappa(overlaps, spec, k), target)).delta;
    out.gaps.emplace_back(k, d);
    deltas.push_back(d);
  }
  const auto m = mean_stderr(deltas);
  out.mean = m.mean;
  out.stderr_ = m.stderr_;
  return out;
}

// ---------------------------------------------------------------------------
// Peaks

struct Peak {
  double alpha = 0.0;
  double delta = 0.0;
  double stderr_ = 0.0;
  int index = 0;
  bool at_boundary = false;
};

/// Grid argmax; ties go to the smaller alpha.
inline Peak find_peak(const std::vector<GapPoint>& pts) {
  require(!pts.empty(), "find_peak: empty curve");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].mean > pts[best].mean) best = i;
  return {pts[best].alpha, pts[best].mean, pts[best].stderr_, static_cast<int>(best),
          best == 0 || best + 1 == pts.size()};
}

inline Peak find_peak(const GapCurve& c) { return find_peak(c.points); }

/// Maximum of a smooth function on [lo, hi]: scan `grid_points` uniformly,
/// then golden-section search around the best grid point.
inline Peak maximize_scalar(const std::function<double(double)>& f, double lo, double hi,
                            int grid_points = 33, double tolerance = 1e-4) {
  require(hi > lo && grid_points >= 3, "maximize_scalar: bad interval");
  std::vector<double> xs(static_cast<std::size_t>(grid_points));
  std::vector<double> ys(xs.size());
  for (int i = 0; i < grid_points; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_points - 1);
    ys[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (ys[i] > ys[best]) best = i;
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[std::min(best + 1, xs.size() - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  Peak p;
  p.alpha = fc >= fd ? c : d;
  p.delta = std::max(fc, fd);
  if (ys[best] > p.delta) {
    p.alpha = xs[best];
    p.delta = ys[best];
  }
  p.at_boundary = p.alpha - lo < 2.0 * tolerance || hi - p.alpha < 2.0 * tolerance;
  return p;
}

// ---------------------------------------------------------------------------
// Scaling fits

enum class FitKind { Exponential, PowerLaw };

inline std::string_view to_string(FitKind k) {
  return k == FitKind::Exponential ? "exponential" : "power";
}

inline FitKind parse_fit_kind(std::string_view s) {
  if (s == "exponential" || s == "exp") return FitKind::Exponential;
  if (s == "power" || s == "powerlaw") return FitKind::PowerLaw;
  throw ConfigError("unknown fit kind '" + std::string(s) + "' (expected exponential or power)");
}

struct ScalingPoint {
  double n = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
};

/// Exponential: delta ~ 2^{-k N}, exponent = k. Power law: delta ~ N^{-g},
/// exponent = g. The fitted slope is -exponent.
struct ScalingFit {
  FitKind kind = FitKind::Exponential;
  double exponent = 0.0;
  double err = 0.0;
  double chi2_nu = 0.0;
  double intercept = 0.0;
  int points_used = 0;
};

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_err = 0.0;
  double chi2 = 0.0;
};

/// Weighted least squares y = a + b x with weights 1/sigma^2.
inline LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& sigma) {
  require(x.size() == y.size() && x.size() == sigma.size(), "line fit: size mismatch");
  require(x.size() >= 2, "line fit: need at least 2 points");
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(sigma[i] > 0.0 && std::isfinite(sigma[i]), "line fit: sigma must be positive");
    const double w = 1.0 / (sigma[i] * sigma[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  double xmin = x[0], xmax = x[0];
  for (double v : x) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  if (!(xmax > xmin) || !(det > 0.0)) throw ConfigError("line fit: degenerate design (all x equal)");
  LineFit f;
  f.slope = (s * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;
  f.slope_err = std::sqrt(s / det);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - f.intercept - f.slope * x[i]) / sigma[i];
    f.chi2 += r * r;
  }
  return f;
}

inline ScalingFit fit_scaling(const std::vector<ScalingPoint>& pts, FitKind kind) {
  require(pts.size() >= 3, "fit_scaling: need at least 3 points");
  std::vector<double> x, y, s;
  for (const auto& p : pts) {
    require(p.delta > 0.0 && std::isfinite(p.delta), "fit_scaling: delta must be positive");
    require(p.sigma > 0.0 && std::isfinite(p.sigma), "fit_scaling: sigma must be positive");
    require(p.n > 0.0, "fit_scaling: N must be positive");
    if (kind == FitKind::Exponential) {
      x.push_back(p.n);
      y.push_back(std::log2(p.delta));
      s.push_back(p.sigma / (p.delta * std::log(2.0)));
    } else {
      x.push_back(std::log(p.n));
      y.push_back(std::log(p.delta));
      s.push_back(p.sigma / p.delta);
    }
  }
  const auto line = weighted_line_fit(x, y, s);
  ScalingFit f;
  f.kind = kind;
  f.exponent = -line.slope;
  f.err = line.slope_err;
  f.intercept = line.intercept;
  f.chi2_nu = line.chi2 / static_cast<double>(pts.size() - 2);
  f.points_used = static_cast<int>(pts.size());
  return f;
}

/// Residual sum of squares of an unweighted straight-line fit.
inline double line_rss(const std::vector<double>& x, const std::vector<double>& y) {
  return weighted_line_fit(x, y, std::vector<double>(x.size(), 1.0)).chi2;
}

/// Value with uncertainty in parenthesis notation, e.g. 0.614(3).
inline std::string format_uncertainty(double value, double err) {
  char buf[64];
  if (!(err > 0.0) || !std::isfinite(err)) {
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
  }
  int decimals = std::max(0, -static_cast<int>(std::floor(std::log10(err))));
  double digits = std::round(err * std::pow(10.0, decimals));
  if (digits >= 10.0 && decimals > 0) {
    --decimals;
    digits = std::round(err * std::pow(10.0, decimals));
  }
  if (decimals == 0) {
    std::snprintf(buf, sizeof buf, "%.0f(%.0f)", value, std::round(err));
  } else {
    std::snprintf(buf, sizeof buf, "%.*f(%.0f)", decimals, value, digits);
  }
  return buf;
}

// ---------------------------------------------------------------------------
// Size sweeps

struct SizeSweepPoint {
  int sites = 0;
  double alpha = 0.0;
  double delta = 0.0;
  double stderr_ = 0.0;
  int instances = 0;
  bool boundary = false;
};

inline std::vector<ScalingPoint> to_scaling_points(const std::vector<SizeSweepPoint>& pts) {
  std::vector<ScalingPoint> out;
  for (const auto& p : pts) out.push_back({static_cast<double>(p.sites), p.delta, p.stderr_});
  return out;
}

struct AlphaEqualsNScan {
  std::vector<SizeSweepPoint> points;
  ScalingFit fit;
};

/// Disorder-averaged gap at alpha = N per size, with an exponential fit.
inline AlphaEqualsNScan alpha_equals_n_scan(Model model, const std::vector<int>& sizes,
                                            std::uint64_t master_seed, int instances,
                                            GapScanParams p, int threads = 0,
                                            const LogSink& log = log_to_stderr) {
  AlphaEqualsNScan out;
  for (int n : sizes) {
    DisorderSpec spec{model, n, master_seed, instances};
    p.alphas = {static_cast<double>(n)};
    const auto scan = disorder_scan(spec, p, threads, log);
    const auto& pt = scan.curve.points.front();
    out.points.push_back({n, pt.alpha, pt.mean, pt.stderr_, pt.count, false});
  }
  out.fit = fit_scaling(to_scaling_points(out.points), FitKind::Exponential);
  return out;
}

}  // namespace qmcmc
