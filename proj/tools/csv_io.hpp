#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmcmc/error.hpp"
#include "run_config.hpp"

namespace qmcmc::cli {

inline constexpr int kSchemaVersion = 1;

struct CsvSchema {
  std::string name;
  std::vector<std::string> columns;
};

inline const std::vector<CsvSchema>& known_schemas() {
  static const std::vector<CsvSchema> s{
      {"gap_scan",
       {"model", "N", "seed", "alpha", "kappa", "h", "beta", "delta", "lambda2", "db_residual",
        "stationarity_residual"}},
      {"ising_bound",
       {"N", "beta", "h", "alpha", "bound", "tail_term", "sector0_term", "sector1_term"}},
      {"disorder_instances",
       {"config_hash", "model", "N", "seed", "alpha", "kappa", "h", "beta", "delta", "lambda2",
        "db_residual", "stationarity_residual", "status"}},
      {"disorder_curve", {"model", "N", "alpha", "kappa", "h", "beta", "mean_delta", "stderr", "instances"}},
      {"scaling", {"N", "protocol", "alpha", "delta", "stderr", "instances", "boundary"}},
      {"kappa_scan", {"model", "N", "seed", "alpha", "kappa", "h", "beta", "delta", "stderr"}},
  };
  return s;
}

inline const CsvSchema& schema(const std::string& name) {
  for (const auto& s : known_schemas())
    if (s.name == name) return s;
  throw ConfigError("unknown CSV schema '" + name + "'");
}

inline std::string header_line(const CsvSchema& s) {
  std::string h;
  for (std::size_t i = 0; i < s.columns.size(); ++i) h += (i ? "," : "") + s.columns[i];
  return h;
}

inline std::string schema_tag(const CsvSchema& s) {
  return "qmcmc." + s.name + "/" + std::to_string(kSchemaVersion);
}

/// CSV writer that prefixes '# schema' and '# config' comment lines. In
/// append mode an existing file with the same schema is extended in place.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const CsvSchema& s, const RunConfig& cfg,
            bool append = false)
      : schema_(s) {
    const bool exists = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    if (!append || !exists) {
      out_ << "# schema: " << schema_tag(s) << '\n';
      out_ << "# config: " << cfg.to_json().dump() << '\n';
      out_ << header_line(s) << '\n';
    }
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != schema_.columns.size())
      throw std::logic_error("CsvWriter: row width does not match schema " + schema_.name);
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  CsvSchema schema_;
  std::ofstream out_;
};

struct CsvTable {
  std::string path;
  std::string schema_tag;  // empty if the file has no schema comment
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }

  int require_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ConfigError(path + ": missing column '" + name + "'");
    return c;
  }

  double number(std::size_t r, int c) const {
    const auto& v = rows[r][static_cast<std::size_t>(c)];
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError(path + ":" + std::to_string(line_numbers[r]) + ": column '" +
                      columns[static_cast<std::size_t>(c)] + "' is not a number: '" + v + "'");
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV '" + path + "'");
  CsvTable t;
  t.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# schema: ";
      if (line.rfind(key, 0) == 0 && t.schema_tag.empty()) t.schema_tag = trim(line.substr(key.size()));
      continue;
    }
    auto fields = split(line, ',');
    if (t.columns.empty()) {
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.columns.size()) + " fields, found " +
                        std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (t.columns.empty()) throw ConfigError(path + ": no header row");
  return t;
}

/// Check a table against a known schema: tag (if present) and exact columns.
inline void validate_table(const CsvTable& t, const CsvSchema& s) {
  if (!t.schema_tag.empty() && t.schema_tag != schema_tag(s))
    throw ConfigError(t.path + ": schema '" + t.schema_tag + "' does not match '" + schema_tag(s) + "'");
  if (t.columns != s.columns)
    throw ConfigError(t.path + ": header does not match schema " + schema_tag(s) + " (expected " +
                      header_line(s) + ")");
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      if (t.rows[r][c].empty())
        throw ConfigError(t.path + ":" + std::to_string(t.line_numbers[r]) + ": empty field '" +
                          t.columns[c] + "'");
}

}  // namespace qmcmc::cli
