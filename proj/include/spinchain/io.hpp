#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinchain/experiments.hpp"

#ifndef SPINCHAIN_VERSION
#define SPINCHAIN_VERSION "0.0.0"
#endif

namespace spinchain::io {

using KeyValues = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Flat key = value text; '#' starts a comment, blank lines ignored.
inline KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
    kv[k] = v;
  }
  return kv;
}

inline KeyValues read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || trim(v.substr(pos)) != "") throw DomainError(key + ": not a number: '" + v + "'");
  return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw DomainError(key + ": not an integer: '" + v + "'");
  return static_cast<long long>(x);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw DomainError(key + ": not a boolean: '" + v + "'");
}

/// Comma list of numbers and inclusive ranges lo:hi:step.
inline std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::stringstream rs(item);
      std::string t;
      while (std::getline(rs, t, ':')) parts.push_back(to_double(key, trim(t)));
      if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
        throw DomainError(key + ": range must be lo:hi:step with step > 0");
      const long long cnt = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
      for (long long i = 0; i < cnt; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    } else {
      out.push_back(to_double(key, item));
    }
  }
  if (out.empty()) throw DomainError(key + ": empty list");
  return out;
}

struct RunConfig {
  std::string command;
  ModelParams params;
  long long n_max = 0;  // 0: command default
  int nodes = 0;        // 0: converge adaptively
  std::vector<int> Ns{100, 150, 200, 250};
  std::vector<double> taus;  // empty: {params.tau}
  std::vector<double> bs;    // ergodicity b-sweep; empty: none
  std::string measure = "both";
  double beta_min = 0.01, beta_max = 40.0;
  int beta_points = 400;
  std::string out = "out";
  int threads = 0;
  bool measures = true;
  bool trace_half = false;
  FitOptions fit;
  RevivalOptions revival;
  KinkOptions kink;
  QuadratureControl qc;
  std::uint64_t seed = 20240607;
};

/// Applies key/value pairs onto defaults. Unknown keys are errors.
inline RunConfig resolve(const std::string& command, const KeyValues& kv) {
  RunConfig c;
  c.command = command;
  for (const auto& [k, v] : kv) {
    if (k == "a") c.params.a = to_double(k, v);
    else if (k == "b") c.params.b = to_double(k, v);
    else if (k == "tau") c.params.tau = to_double(k, v);
    else if (k == "beta") c.params.beta = to_double(k, v);
    else if (k == "gamma") c.params.gamma = to_double(k, v);
    else if (k == "J") c.params.J = to_double(k, v);
    else if (k == "n_max") c.n_max = to_int(k, v);
    else if (k == "nodes") c.nodes = static_cast<int>(to_int(k, v));
    else if (k == "N") {
      c.Ns.clear();
      for (double x : to_list(k, v)) {
        if (x != std::floor(x)) throw DomainError("N: not an integer");
        c.Ns.push_back(static_cast<int>(x));
      }
    } else if (k == "taus") c.taus = to_list(k, v);
    else if (k == "bs") c.bs = to_list(k, v);
    else if (k == "measure") {
      if (v != "concurrence" && v != "discord" && v != "both") throw DomainError("measure: concurrence|discord|both");
      c.measure = v;
    } else if (k == "beta_min") c.beta_min = to_double(k, v);
    else if (k == "beta_max") c.beta_max = to_double(k, v);
    else if (k == "beta_points") c.beta_points = static_cast<int>(to_int(k, v));
    else if (k == "out") c.out = v;
    else if (k == "threads") c.threads = static_cast<int>(to_int(k, v));
    else if (k == "measures") c.measures = to_bool(k, v);
    else if (k == "trace_half") c.trace_half = to_bool(k, v);
    else if (k == "fit_block") c.fit.block = static_cast<int>(to_int(k, v));
    else if (k == "fit_tail") c.fit.tail_fraction = to_double(k, v);
    else if (k == "window") c.revival.window = static_cast<int>(to_int(k, v));
    else if (k == "threshold") c.revival.threshold = to_double(k, v);
    else if (k == "n0") c.revival.n0 = to_int(k, v);
    else if (k == "sustain") c.revival.sustain = static_cast<int>(to_int(k, v));
    else if (k == "kink_factor") c.kink.factor = to_double(k, v);
    else if (k == "kink_window") c.kink.match_window = to_double(k, v);
    else if (k == "quad_tol") c.qc.tol = to_double(k, v);
    else if (k == "quad_max_nodes") c.qc.max_nodes = static_cast<int>(to_int(k, v));
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_int(k, v));
    else throw DomainError("unknown config key '" + k + "'");
  }
  c.params.validate();
  if (c.taus.empty()) c.taus = {c.params.tau};
  if (c.threads < 0) throw DomainError("threads must be >= 0");
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["params"] = {{"J", c.params.J},       {"gamma", c.params.gamma}, {"a", c.params.a},
                 {"b", c.params.b},       {"tau", c.params.tau},     {"beta", c.params.beta}};
  j["n_max"] = c.n_max;
  j["nodes"] = c.nodes;
  j["N"] = c.Ns;
  j["taus"] = c.taus;
  j["bs"] = c.bs;
  j["measure"] = c.measure;
  j["beta_grid"] = {{"min", c.beta_min}, {"max", c.beta_max}, {"points", c.beta_points}};
  j["out"] = c.out;
  j["threads"] = resolve_threads(c.threads);
  j["measures"] = c.measures;
  j["trace_half"] = c.trace_half;
  j["fit"] = {{"block", c.fit.block}, {"tail_fraction", c.fit.tail_fraction}};
  j["revival"] = {{"window", c.revival.window},
                  {"threshold", c.revival.threshold},
                  {"n0", c.revival.n0},
                  {"sustain", c.revival.sustain}};
  j["kink"] = {{"factor", c.kink.factor}, {"match_window", c.kink.match_window}};
  j["quadrature"] = {{"start_nodes", c.qc.start_nodes}, {"max_nodes", c.qc.max_nodes}, {"tol", c.qc.tol}};
  j["seed"] = c.seed;
  return j;
}

/// 17 significant digits; non-finite values as nan / inf.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV with a header row of "name [unit]" columns.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : f_(path), path_(path) {
    if (!f_) throw Error("cannot write " + path.string());
    cols_ = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) f_ << (i ? "," : "") << header[i];
    f_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw Error("csv row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << '\n';
  }

 private:
  std::ofstream f_;
  std::filesystem::path path_;
  std::size_t cols_ = 0;
};

inline void write_manifest(const std::filesystem::path& path, const RunConfig& c, double seconds,
                           const nlohmann::json& summary, const std::vector<std::string>& files) {
  nlohmann::json j;
  j["version"] = SPINCHAIN_VERSION;
  j["config"] = to_json(c);
  j["timing"] = {{"wall_seconds", seconds}};
  j["outputs"] = files;
  j["summary"] = summary;
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace spinchain::io
