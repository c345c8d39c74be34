#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmcmc/analysis.hpp"
#include "qmcmc/error.hpp"
#include "qmcmc/freefermion.hpp"
#include "qmcmc/problems.hpp"
#include "qmcmc/quantum.hpp"
#include "qmcmc/schedule.hpp"

namespace qmcmc::cli {

inline std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto d = std::stoull(v, &pos);
    if (pos == v.size() && v.find('-') == std::string::npos) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
}

/// "a,b,c" or "log:lo:hi:n"
inline std::vector<double> parse_grid(const std::string& key, const std::string& v) {
  if (v.rfind("log:", 0) == 0) {
    const auto parts = split(v.substr(4), ':');
    if (parts.size() != 3) throw ConfigError("config: '" + key + "' expects log:lo:hi:n");
    return log_grid(parse_double(key, parts[0]), parse_double(key, parts[1]),
                    static_cast<int>(parse_int(key, parts[2])));
  }
  std::vector<double> g;
  for (const auto& p : split(v, ',')) g.push_back(parse_double(key, p));
  if (g.empty()) throw ConfigError("config: '" + key + "' is empty");
  return g;
}

/// "n" or "lo:hi" or "lo:hi:step"
inline std::vector<int> parse_sizes(const std::string& key, const std::string& v) {
  const auto parts = split(v, ':');
  if (parts.size() == 1) return {static_cast<int>(parse_int(key, parts[0]))};
  if (parts.size() > 3) throw ConfigError("config: '" + key + "' expects lo:hi[:step]");
  const int lo = static_cast<int>(parse_int(key, parts[0]));
  const int hi = static_cast<int>(parse_int(key, parts[1]));
  const int step = parts.size() == 3 ? static_cast<int>(parse_int(key, parts[2])) : 1;
  if (step <= 0 || hi < lo) throw ConfigError("config: '" + key + "' needs lo <= hi and step > 0");
  std::vector<int> out;
  for (int n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

struct RunConfig {
  Model model = Model::IsingChain;
  std::vector<int> sizes{8};
  double beta = 5.0;
  double h = 1.5;
  RampKind schedule = RampKind::Sin2;
  std::vector<double> alphas = default_alpha_grid();
  KappaMode kappa;  // empty = inf
  std::vector<double> kappas = default_kappa_grid();
  int instances = 50;
  std::uint64_t seed = 1;
  int steps = kDefaultStepsPerUnitTime;
  int mode_steps = kDefaultModeStepsPerUnitTime;
  std::string out = ".";
  int threads = 0;
  std::optional<std::string> instance_file;
  bool alpha_equals_n = false;

  /// Apply one key=value setting. Keys use '_' or '-' interchangeably.
  void set(std::string key, const std::string& v) {
    for (auto& c : key)
      if (c == '-') c = '_';
    if (key == "model") model = parse_model(v);
    else if (key == "n" || key == "N" || key == "n_range" || key == "N_range") sizes = parse_sizes(key, v);
    else if (key == "beta") beta = parse_double(key, v);
    else if (key == "h") h = parse_double(key, v);
    else if (key == "schedule") schedule = parse_ramp_kind(v);
    else if (key == "alphas" || key == "alpha") alphas = parse_grid(key, v);
    else if (key == "kappa") kappa = (v == "inf" ? KappaMode{} : KappaMode{parse_double(key, v)});
    else if (key == "kappas") kappas = parse_grid(key, v);
    else if (key == "instances") instances = static_cast<int>(parse_int(key, v));
    else if (key == "seed") seed = parse_u64(key, v);
    else if (key == "steps") steps = static_cast<int>(parse_int(key, v));
    else if (key == "mode_steps") mode_steps = static_cast<int>(parse_int(key, v));
    else if (key == "out") out = v;
    else if (key == "threads") threads = static_cast<int>(parse_int(key, v));
    else if (key == "instance_file") instance_file = v;
    else if (key == "alpha_equals_n") alpha_equals_n = (v == "1" || v == "true" || v == "yes");
    else throw ConfigError("config: unknown key '" + key + "'");
  }

  /// Flat key=value file; '#' starts a comment.
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
      try {
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      } catch (const ConfigError& e) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  /// Checks shared by every subcommand; `dense` adds the exact-diagonalisation cap.
  void validate(bool dense) const {
    require(!sizes.empty(), "config: no system sizes");
    for (int n : sizes) {
      require(n >= 1, "config: N must be positive");
      if (dense && n > kMaxDenseSites)
        throw ConfigError("config: N=" + std::to_string(n) + " exceeds the dense cap N <= " +
                          std::to_string(kMaxDenseSites));
    }
    require(std::isfinite(beta) && beta >= 0.0, "config: beta must be finite and >= 0");
    require(std::isfinite(h) && h > 0.0, "config: h must be finite and > 0");
    require(!alphas.empty(), "config: empty alpha grid");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      require(alphas[i] >= 0.0 && std::isfinite(alphas[i]), "config: alpha must be >= 0");
      if (i) require(alphas[i] > alphas[i - 1], "config: alpha grid must be strictly increasing");
    }
    if (schedule == RampKind::Quench)
      for (double a : alphas) require(a == 0.0, "config: a quench schedule needs alphas=0");
    if (kappa) require(*kappa >= 0.0 && std::isfinite(*kappa), "config: kappa must be >= 0 or inf");
    for (double k : kappas) require(k > 0.0 && std::isfinite(k), "config: kappas must be > 0");
    require(instances >= 1, "config: instances must be >= 1");
    require(steps >= 1, "config: steps must be >= 1");
    require(mode_steps >= 1, "config: mode_steps must be >= 1");
    require(threads >= 0, "config: threads must be >= 0");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["model"] = std::string(to_string(model));
    j["N"] = sizes;
    j["beta"] = beta;
    j["h"] = h;
    j["schedule"] = std::string(to_string(schedule));
    j["alphas"] = alphas;
    if (kappa) j["kappa"] = *kappa;
    else j["kappa"] = "inf";
    j["kappas"] = kappas;
    j["instances"] = instances;
    j["seed"] = seed;
    j["steps"] = steps;
    j["mode_steps"] = mode_steps;
    j["instance_file"] = instance_file ? nlohmann::ordered_json(*instance_file) : nullptr;
    j["alpha_equals_n"] = alpha_equals_n;
    j["out"] = out;
    j["threads"] = threads;
    return j;
  }

  /// Hash of the settings that determine per-instance results (not N, out or threads).
  std::string physics_hash() const {
    auto j = to_json();
    j.erase("N");
    j.erase("out");
    j.erase("threads");
    j.erase("instances");
    const std::string s = j.dump();
    std::uint64_t x = 1469598103934665603ULL;
    for (unsigned char c : s) {
      x ^= c;
      x *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
  }
};

}  // namespace qmcmc::cli
