// qmcmc: command-line driver for dressed-proposal MCMC experiments.
//
//   qmcmc gap          exact gaps from the dense pipeline      -> gap_scan.csv
//   qmcmc ising-bound  free-fermion bottleneck bound            -> ising_bound.csv
//   qmcmc disorder     disorder-averaged gap curves             -> disorder_*.csv, scaling.csv
//   qmcmc kappa        finite plateau scans and their average   -> kappa_scan.csv
//   qmcmc fit          exponential / power-law fits of a CSV    -> fit.json
//   qmcmc plot-data    validate outputs, write a manifest       -> plot_manifest.json
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "csv_io.hpp"
#include "json.hpp"
#include "qmcmc/instance_io.hpp"
#include "qmcmc/qmcmc.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace qmcmc;
using namespace qmcmc::cli;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(double v) { return format_double(v); }

std::string kappa_field(const KappaMode& k) { return k ? fmt(*k) : "inf"; }

void write_json(const fs::path& path, const ojson& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + cfg.out + "'");
  return dir;
}

GapScanParams scan_params(const RunConfig& cfg, std::vector<double> alphas) {
  GapScanParams p;
  p.beta = cfg.beta;
  p.h = cfg.h;
  p.kind = cfg.schedule;
  p.alphas = std::move(alphas);
  p.kappa = cfg.kappa;
  p.steps_per_unit_time = cfg.steps;
  return p;
}

/// Instances of one run: the file override, the single Ising chain, or the
/// seeded disorder ensemble.
std::vector<ClassicalHamiltonian> run_instances(const RunConfig& cfg, int n) {
  if (cfg.instance_file) return {load_instance(*cfg.instance_file)};
  if (cfg.model == Model::IsingChain) return {ClassicalHamiltonian::ising_chain(n)};
  DisorderSpec spec{cfg.model, n, cfg.seed, cfg.instances};
  std::vector<ClassicalHamiltonian> out;
  for (int i = 0; i < cfg.instances; ++i) out.push_back(spec.instance(i));
  return out;
}

std::vector<int> run_sizes(const RunConfig& cfg) {
  if (cfg.instance_file) return {load_instance(*cfg.instance_file).sites()};
  return cfg.sizes;
}

ojson curve_json(const std::vector<GapPoint>& pts) {
  ojson arr = ojson::array();
  for (const auto& p : pts)
    arr.push_back({{"alpha", p.alpha}, {"mean_delta", p.mean}, {"stderr", p.stderr_}, {"instances", p.count}});
  return arr;
}

ojson peak_json(const Peak& p) {
  return {{"alpha", p.alpha}, {"delta", p.delta}, {"stderr", p.stderr_}, {"boundary", p.at_boundary}};
}

ojson fit_json(const ScalingFit& f) {
  return {{"kind", std::string(to_string(f.kind))},
          {"exponent", f.exponent},
          {"err", f.err},
          {"chi2_nu", f.chi2_nu},
          {"points_used", f.points_used},
          {"formatted", format_uncertainty(f.exponent, f.err)}};
}

// ---------------------------------------------------------------------------

int cmd_gap(const RunConfig& cfg) {
  cfg.validate(true);
  const auto dir = prepare_out(cfg);
  CsvWriter csv(dir / "gap_scan.csv", schema("gap_scan"), cfg);
  ojson summary;
  summary["schema"] = "qmcmc.gap_summary/" + std::to_string(kSchemaVersion);
  summary["config"] = cfg.to_json();
  summary["sizes"] = ojson::array();
  int failures = 0;
  int successes = 0;
  for (int n : run_sizes(cfg)) {
    require(n <= kMaxDenseSites, "gap: N=" + std::to_string(n) + " exceeds the dense cap N <= " +
                                     std::to_string(kMaxDenseSites));
    const auto hams = run_instances(cfg, n);
    const auto params = scan_params(cfg, cfg.alphas);
    const auto per = parallel_map(
        hams.size(), [&](std::size_t i) { return instance_gaps(hams[i], params); }, cfg.threads);
    std::vector<GapRecord> all;
    for (std::size_t i = 0; i < per.size(); ++i) {
      for (const auto& r : per[i]) {
        if (!r.ok) {
          ++failures;
          std::cerr << "gap: N=" << n << " seed " << r.seed << " alpha " << r.alpha
                    << " failed: " << r.error << '\n';
          continue;
        }
        ++successes;
        csv.row({std::string(to_string(hams[i].model())), std::to_string(n), std::to_string(r.seed),
                 fmt(r.alpha), kappa_field(r.kappa), fmt(cfg.h), fmt(cfg.beta), fmt(r.delta),
                 fmt(r.lambda2), fmt(r.db_residual), fmt(r.stationarity_residual)});
        all.push_back(r);
      }
      csv.flush();
    }
    const auto pts = aggregate(all);
    ojson entry{{"N", n}, {"curve", curve_json(pts)}};
    if (!pts.empty()) entry["peak"] = peak_json(find_peak(pts));
    summary["sizes"].push_back(entry);
  }
  write_json(dir / "gap_summary.json", summary);
  if (successes == 0 && failures > 0) throw NumericalError("gap: every instance failed");
  return 0;
}

int cmd_ising_bound(const RunConfig& cfg) {
  cfg.validate(false);
  require(!cfg.instance_file, "ising-bound: --instance-file does not apply");
  if (cfg.kappa)
    throw ConfigError("ising-bound: only the large-kappa bound is available (use kappa=inf)");
  for (int n : cfg.sizes)
    require(n >= 4 && n % 2 == 0, "ising-bound: N must be even and >= 4 (got " + std::to_string(n) + ")");
  const auto dir = prepare_out(cfg);
  CsvWriter csv(dir / "ising_bound.csv", schema("ising_bound"), cfg);
  ojson summary;
  summary["schema"] = "qmcmc.ising_bound_summary/" + std::to_string(kSchemaVersion);
  summary["config"] = cfg.to_json();
  summary["sizes"] = ojson::array();
  for (int n : cfg.sizes) {
    const auto bounds = parallel_map(
        cfg.alphas.size(),
        [&](std::size_t i) {
          return ising_bound(n, cfg.beta, cfg.h, schedule_for(cfg.schedule, cfg.alphas[i], std::nullopt),
                             cfg.mode_steps);
        },
        cfg.threads);
    std::vector<GapPoint> pts;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const auto& b = bounds[i];
      csv.row({std::to_string(n), fmt(cfg.beta), fmt(cfg.h), fmt(cfg.alphas[i]), fmt(b.bound),
               fmt(b.tail), fmt(b.sector0), fmt(b.sector1)});
      pts.push_back({cfg.alphas[i], b.bound, 0.0, 1});
    }
    csv.flush();
    summary["sizes"].push_back({{"N", n}, {"peak", peak_json(find_peak(pts))}});
  }
  write_json(dir / "ising_bound_summary.json", summary);
  return 0;
}

/// Records of earlier runs with the same physics hash, keyed by (N, seed).
std::map<std::pair<int, std::uint64_t>, std::vector<GapRecord>> load_records(const fs::path& path,
                                                                             const std::string& hash) {
  std::map<std::pair<int, std::uint64_t>, std::vector<GapRecord>> out;
  if (!fs::exists(path)) return out;
  const auto t = read_csv(path.string());
  validate_table(t, schema("disorder_instances"));
  const int c_hash = t.require_column("config_hash");
  const int c_n = t.require_column("N");
  const int c_seed = t.require_column("seed");
  const int c_alpha = t.require_column("alpha");
  const int c_kappa = t.require_column("kappa");
  const int c_delta = t.require_column("delta");
  const int c_l2 = t.require_column("lambda2");
  const int c_db = t.require_column("db_residual");
  const int c_st = t.require_column("stationarity_residual");
  const int c_status = t.require_column("status");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][static_cast<std::size_t>(c_hash)] != hash) continue;
    GapRecord g;
    const int n = static_cast<int>(t.number(r, c_n));
    g.seed = parse_u64("seed", t.rows[r][static_cast<std::size_t>(c_seed)]);
    g.alpha = t.number(r, c_alpha);
    if (t.rows[r][static_cast<std::size_t>(c_kappa)] != "inf") g.kappa = t.number(r, c_kappa);
    g.ok = t.rows[r][static_cast<std::size_t>(c_status)] == "ok";
    if (g.ok) {
      g.delta = t.number(r, c_delta);
      g.lambda2 = t.number(r, c_l2);
      g.db_residual = t.number(r, c_db);
      g.stationarity_residual = t.number(r, c_st);
    } else {
      g.error = t.rows[r][static_cast<std::size_t>(c_status)];
    }
    out[{n, g.seed}].push_back(g);
  }
  return out;
}

std::vector<double> disorder_alphas(const RunConfig& cfg, int n) {
  auto a = cfg.alphas;
  if (cfg.alpha_equals_n) {
    a.push_back(static_cast<double>(n));
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return a;
}

int cmd_disorder(const RunConfig& cfg) {
  cfg.validate(true);
  require(!cfg.instance_file, "disorder: --instance-file does not apply; use gap");
  require(cfg.model != Model::IsingChain, "disorder: model must be sk or 3spin");
  require(cfg.instances >= 2, "disorder: need at least 2 instances");
  const auto dir = prepare_out(cfg);
  const auto hash = cfg.physics_hash();
  const auto records_path = dir / "disorder_instances.csv";
  auto stored = load_records(records_path, hash);

  CsvWriter records(records_path, schema("disorder_instances"), cfg, true);
  std::mutex write_mutex;
  std::vector<std::tuple<int, std::vector<GapPoint>>> curves;
  for (int n : cfg.sizes) {
    const auto alphas = disorder_alphas(cfg, n);
    const auto params = scan_params(cfg, alphas);
    const DisorderSpec spec{cfg.model, n, cfg.seed, cfg.instances};
    auto per = parallel_map(
        static_cast<std::size_t>(cfg.instances),
        [&](std::size_t i) {
          const auto seed = spec.instance_seed(static_cast<int>(i));
          std::vector<GapRecord> kept;
          std::set<double> have;
          if (auto it = stored.find({n, seed}); it != stored.end())
            for (const auto& r : it->second)
              if (std::find(alphas.begin(), alphas.end(), r.alpha) != alphas.end() &&
                  have.insert(r.alpha).second)
                kept.push_back(r);
          auto p = params;
          p.alphas.clear();
          for (double a : alphas)
            if (!have.count(a)) p.alphas.push_back(a);
          if (p.alphas.empty()) return kept;

          auto fresh = instance_gaps(spec.instance(static_cast<int>(i)), p);
          {
            std::lock_guard<std::mutex> lock(write_mutex);
            for (const auto& r : fresh) {
              if (!r.ok)
                std::cerr << "disorder: N=" << n << " seed " << r.seed << " alpha " << r.alpha
                          << " excluded: " << r.error << '\n';
              records.row({hash, std::string(to_string(cfg.model)), std::to_string(n),
                           std::to_string(r.seed), fmt(r.alpha), kappa_field(r.kappa), fmt(cfg.h),
                           fmt(cfg.beta), fmt(r.delta), fmt(r.lambda2), fmt(r.db_residual),
                           fmt(r.stationarity_residual), r.ok ? "ok" : "failed"});
            }
            records.flush();
          }
          fresh.insert(fresh.end(), kept.begin(), kept.end());
          std::sort(fresh.begin(), fresh.end(),
                    [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
          return fresh;
        },
        cfg.threads);
    std::vector<GapRecord> all;
    for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
    curves.emplace_back(n, aggregate(all));
  }

  CsvWriter curve_csv(dir / "disorder_curve.csv", schema("disorder_curve"), cfg);
  CsvWriter scaling_csv(dir / "scaling.csv", schema("scaling"), cfg);
  ojson summary;
  summary["schema"] = "qmcmc.disorder_summary/" + std::to_string(kSchemaVersion);
  summary["config"] = cfg.to_json();
  summary["config_hash"] = hash;
  summary["sizes"] = ojson::array();
  std::map<std::string, std::vector<ScalingPoint>> series;
  for (const auto& [n, pts] : curves) {
    for (const auto& p : pts)
      curve_csv.row({std::string(to_string(cfg.model)), std::to_string(n), fmt(p.alpha),
                     kappa_field(cfg.kappa), fmt(cfg.h), fmt(cfg.beta), fmt(p.mean), fmt(p.stderr_),
                     std::to_string(p.count)});
    ojson entry{{"N", n}, {"curve", curve_json(pts)}};
    auto emit = [&](const std::string& protocol, const GapPoint& p, bool boundary) {
      scaling_csv.row({std::to_string(n), protocol, fmt(p.alpha), fmt(p.mean), fmt(p.stderr_),
                       std::to_string(p.count), boundary ? "1" : "0"});
      if (p.count >= 2 && p.mean > 0.0 && p.stderr_ > 0.0)
        series[protocol].push_back({static_cast<double>(n), p.mean, p.stderr_});
    };
    if (!pts.empty() && pts.front().alpha == 0.0) emit("quench", pts.front(), false);
    if (!pts.empty()) {
      const auto pk = find_peak(pts);
      emit("peak", pts[static_cast<std::size_t>(pk.index)], pk.at_boundary);
      entry["peak"] = peak_json(pk);
      if (pk.at_boundary)
        std::cerr << "disorder: N=" << n << " peak at the alpha-grid boundary (alpha=" << pk.alpha
                  << "); consider extending the grid\n";
    }
    for (const auto& p : pts)
      if (p.alpha == static_cast<double>(n)) emit("alpha_n", p, false);
    summary["sizes"].push_back(entry);
  }
  summary["fits"] = ojson::object();
  for (const auto& [protocol, pts] : series)
    if (pts.size() >= 3) {
      std::set<double> ns;
      for (const auto& p : pts) ns.insert(p.n);
      if (ns.size() >= 2) summary["fits"][protocol] = fit_json(fit_scaling(pts, FitKind::Exponential));
    }
  write_json(dir / "disorder_summary.json", summary);
  return 0;
}

int cmd_kappa(const RunConfig& cfg) {
  cfg.validate(true);
  const auto dir = prepare_out(cfg);
  CsvWriter csv(dir / "kappa_scan.csv", schema("kappa_scan"), cfg);
  ojson summary;
  summary["schema"] = "qmcmc.kappa_summary/" + std::to_string(kSchemaVersion);
  summary["config"] = cfg.to_json();
  summary["scans"] = ojson::array();
  for (int n : run_sizes(cfg)) {
    const auto hams = run_instances(cfg, n);
    const auto scans = parallel_map(
        hams.size() * cfg.alphas.size(),
        [&](std::size_t w) {
          const auto& h = hams[w / cfg.alphas.size()];
          return kappa_scan(h, cfg.beta, cfg.h, cfg.schedule, cfg.alphas[w % cfg.alphas.size()],
                            cfg.kappas, cfg.steps);
        },
        cfg.threads);
    for (std::size_t w = 0; w < scans.size(); ++w) {
      const auto& h = hams[w / cfg.alphas.size()];
      const double alpha = cfg.alphas[w % cfg.alphas.size()];
      const auto& s = scans[w];
      const std::string model(to_string(h.model()));
      const std::string seed = std::to_string(h.seed().value_or(0));
      for (const auto& [k, d] : s.gaps)
        csv.row({model, std::to_string(n), seed, fmt(alpha), fmt(k), fmt(cfg.h), fmt(cfg.beta), fmt(d), "0"});
      csv.row({model, std::to_string(n), seed, fmt(alpha), "inf", fmt(cfg.h), fmt(cfg.beta),
               fmt(s.large_kappa_gap), "0"});
      csv.row({model, std::to_string(n), seed, fmt(alpha), "avg", fmt(cfg.h), fmt(cfg.beta), fmt(s.mean),
               fmt(s.stderr_)});
      summary["scans"].push_back({{"N", n},
                                  {"seed", h.seed().value_or(0)},
                                  {"alpha", alpha},
                                  {"large_kappa_gap", s.large_kappa_gap},
                                  {"kappa_avg_gap", s.mean},
                                  {"kappa_avg_stderr", s.stderr_},
                                  {"avg_within_bound", s.mean <= s.large_kappa_gap + 2.0 * s.stderr_}});
    }
    csv.flush();
  }
  write_json(dir / "kappa_summary.json", summary);
  return 0;
}

struct FitOptions {
  std::string input;
  std::string kind = "exponential";
  std::string protocol;
  bool unweighted = false;
};

int cmd_fit(const RunConfig& cfg, const FitOptions& opt) {
  require(!opt.input.empty(), "fit: --input is required");
  const auto kind = parse_fit_kind(opt.kind);
  const auto t = read_csv(opt.input);
  const int c_n = t.require_column("N");
  const int c_delta = t.column("delta") >= 0 ? t.column("delta") : t.column("mean_delta");
  if (c_delta < 0) throw ConfigError(opt.input + ": missing column 'delta'");
  const int c_err = t.column("stderr");
  const int c_protocol = t.column("protocol");
  if (!opt.protocol.empty() && c_protocol < 0)
    throw ConfigError(opt.input + ": --protocol given but the file has no 'protocol' column");
  if (c_err < 0 && !opt.unweighted)
    throw ConfigError(opt.input + ": missing column 'stderr' (use --unweighted for equal weights)");
  std::vector<ScalingPoint> pts;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!opt.protocol.empty() && t.rows[r][static_cast<std::size_t>(c_protocol)] != opt.protocol) continue;
    const double n = t.number(r, c_n);
    const double d = t.number(r, c_delta);
    const double s = opt.unweighted ? d : t.number(r, c_err);
    if (!(d > 0.0) || !(s > 0.0))
      throw ConfigError(opt.input + ":" + std::to_string(t.line_numbers[r]) +
                        ": delta and stderr must be positive for a fit");
    pts.push_back({n, d, s});
  }
  const auto fit = fit_scaling(pts, kind);
  const auto dir = prepare_out(cfg);
  ojson j = fit_json(fit);
  j["schema"] = "qmcmc.fit/" + std::to_string(kSchemaVersion);
  j["input"] = opt.input;
  j["protocol"] = opt.protocol;
  j["unweighted"] = opt.unweighted;
  write_json(dir / "fit.json", j);
  std::cout << to_string(kind) << " exponent " << format_uncertainty(fit.exponent, fit.err)
            << " chi2_nu " << fit.chi2_nu << " (" << fit.points_used << " points)\n";
  return 0;
}

int cmd_plot_data(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  if (!fs::is_directory(dir)) throw ConfigError("plot-data: output directory '" + cfg.out + "' does not exist");
  ojson manifest;
  manifest["schema"] = "qmcmc.plot_manifest/" + std::to_string(kSchemaVersion);
  manifest["files"] = ojson::array();
  for (const auto& s : known_schemas()) {
    const auto path = dir / (s.name + ".csv");
    if (!fs::exists(path)) continue;
    const auto t = read_csv(path.string());
    validate_table(t, s);
    manifest["files"].push_back({{"name", s.name},
                                 {"path", path.filename().string()},
                                 {"schema", schema_tag(s)},
                                 {"columns", s.columns},
                                 {"rows", t.rows.size()}});
  }
  manifest["json"] = ojson::array();
  for (const char* name : {"fit.json", "gap_summary.json", "ising_bound_summary.json",
                           "disorder_summary.json", "kappa_summary.json"}) {
    const auto path = dir / name;
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    try {
      ojson j = ojson::parse(in);
      manifest["json"].push_back({{"path", name}, {"schema", j.value("schema", "")}});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  if (manifest["files"].empty()) std::cerr << "plot-data: no known CSV outputs in '" << cfg.out << "'\n";
  write_json(dir / "plot_manifest.json", manifest);
  return 0;
}

const std::vector<std::pair<std::string, std::string>> kConfigKeys{
    {"model", "ising | sk | 3spin"},
    {"N", "system size"},
    {"N-range", "sizes lo:hi[:step]"},
    {"beta", "inverse temperature"},
    {"h", "transverse field"},
    {"schedule", "sin2 | linear | quench"},
    {"alphas", "ramp times a,b,c or log:lo:hi:n"},
    {"kappa", "plateau length, or inf for the time average"},
    {"kappas", "plateau grid for the kappa scan"},
    {"instances", "disorder instances per size"},
    {"seed", "master seed"},
    {"steps", "split-step steps per unit time"},
    {"mode-steps", "RK4 steps per unit time for momentum modes"},
    {"out", "output directory"},
    {"threads", "worker threads (0: QMCMC_THREADS or hardware)"},
    {"instance-file", "JSON instance instead of sampling"}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dressed-proposal MCMC: exact gaps, bottleneck bounds and scaling fits"};
  app.require_subcommand(1);
  // -h is the transverse field, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");

  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool alpha_equals_n = false;
  FitOptions fit_opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value configuration file");
    for (const auto& [key, help] : kConfigKeys) sub->add_option("--" + key, overrides[key], help);
  };
  auto* gap = app.add_subcommand("gap", "exact spectral gaps from the dense pipeline");
  auto* bound = app.add_subcommand("ising-bound", "free-fermion bottleneck bound for the Ising chain");
  auto* disorder = app.add_subcommand("disorder", "disorder-averaged gap curves");
  auto* kappa = app.add_subcommand("kappa", "finite plateau scans and their average");
  auto* fit = app.add_subcommand("fit", "exponential or power-law fit of a CSV");
  auto* plot = app.add_subcommand("plot-data", "validate outputs and write plot_manifest.json");
  for (auto* sub : {gap, bound, disorder, kappa, fit, plot}) add_common(sub);
  disorder->add_flag("--alpha-equals-n", alpha_equals_n, "also evaluate alpha = N");
  fit->add_option("--input", fit_opts.input, "CSV with N, delta and stderr columns")->required();
  fit->add_option("--kind", fit_opts.kind, "exponential | power");
  fit->add_option("--protocol", fit_opts.protocol, "row filter for scaling.csv");
  fit->add_flag("--unweighted", fit_opts.unweighted, "equal weights in log space");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "qmcmc: " << e.what() << '\n';
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (auto* sub : app.get_subcommands())
      for (const auto& [key, help] : kConfigKeys)
        if (sub->count("--" + key) > 0) cfg.set(key, overrides[key]);
    if (alpha_equals_n) cfg.alpha_equals_n = true;

    if (gap->parsed()) return cmd_gap(cfg);
    if (bound->parsed()) return cmd_ising_bound(cfg);
    if (disorder->parsed()) return cmd_disorder(cfg);
    if (kappa->parsed()) return cmd_kappa(cfg);
    if (fit->parsed()) return cmd_fit(cfg, fit_opts);
    if (plot->parsed()) return cmd_plot_data(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "qmcmc: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "qmcmc: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "qmcmc: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
