// Copyright 2026 The qthermo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qthermo/random.hpp"
#include "qthermo/sweep.hpp"

namespace qthermo {

enum class OutputFormat { csv, json };

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + std::string(s) + "'");
}

inline constexpr std::string_view kCsvHeader =
    "temperature,scenario,unitary_family,state_index,optimal_qfi,thermal_qfi_reference,cramer_rao_bound,seed,"
    "restarts,evaluations";

/// 12 significant digits.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_csv(std::vector<SweepRecord> records) {
  sort_records(records);
  std::string out(kCsvHeader);
  out += '\n';
  for (const SweepRecord& r : records) {
    out += format_real(r.temperature);
    out += ',' + r.scenario + ',' + r.unitary_family + ',';
    if (r.state_index) out += std::to_string(*r.state_index);
    out += ',' + format_real(r.optimal_qfi);
    out += ',' + format_real(r.thermal_qfi_reference);
    out += ',' + format_real(r.cramer_rao_bound);
    out += ',' + std::to_string(r.seed);
    out += ',' + std::to_string(r.restarts);
    out += ',' + std::to_string(r.evaluations);
    out += '\n';
  }
  return out;
}

class CsvParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_real(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw CsvParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

inline unsigned long long parse_unsigned(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s.front() == '-') {
    throw CsvParseError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline std::vector<SweepRecord> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw CsvParseError("missing or unexpected CSV header");
  std::vector<SweepRecord> out;
  for (std::size_t n = 2; std::getline(is, line); ++n) {
    if (line.empty()) continue;
    const auto f = detail::split_commas(line);
    if (f.size() != 10) throw CsvParseError("line " + std::to_string(n) + ": expected 10 fields");
    SweepRecord r;
    r.temperature = detail::parse_real(f[0], n);
    r.scenario = f[1];
    r.unitary_family = f[2];
    if (!f[3].empty()) r.state_index = detail::parse_unsigned(f[3], n);
    r.optimal_qfi = detail::parse_real(f[4], n);
    r.thermal_qfi_reference = detail::parse_real(f[5], n);
    r.cramer_rao_bound = detail::parse_real(f[6], n);
    r.seed = detail::parse_unsigned(f[7], n);
    r.restarts = detail::parse_unsigned(f[8], n);
    r.evaluations = detail::parse_unsigned(f[9], n);
    out.push_back(std::move(r));
  }
  return out;
}

/// Run settings stamped next to the records in JSON output.
struct SweepMetadata {
  SweepConfig config;
  std::string rng_algorithm = kRngAlgorithm;
  std::string optimizer = "Nelder-Mead multistart (reflection 1, expansion 2, contraction 0.5, shrink 0.5)";
  std::string state_sampling = "uniform cube [-1,1]^12 rejection, positive on [t_min-2h, t_max+2h]";
  std::string type2_unitary = "optimized per sampled state";
  double qfi_pair_threshold = kQfiPairThreshold;
};

inline nlohmann::json to_json(const SweepConfig& c) {
  nlohmann::json scenarios = nlohmann::json::array();
  for (ProblemKind k : c.scenarios) scenarios.push_back(std::string(to_string(k)));
  auto budget = [](const Budget& b) { return nlohmann::json{{"restarts", b.restarts}, {"evaluations", b.evaluations}}; };
  return {{"t_min", c.t_min},
          {"t_max", c.t_max},
          {"t_step", c.t_step},
          {"scenarios", scenarios},
          {"unitary_family", std::string(to_string(c.family))},
          {"n_states", c.n_states},
          {"n_bound_runs", c.n_bound_runs},
          {"master_seed", c.master_seed},
          {"h", c.h},
          {"point_budget", budget(c.point_budget)},
          {"cloud_budget", budget(c.cloud_budget)},
          {"bound_budget", budget(c.bound_budget)},
          {"workers", c.workers}};
}

/// Overlays the keys present in `j` on `base`. Unknown keys are an error.
inline SweepConfig sweep_config_from_json(const nlohmann::json& j, SweepConfig base = {}) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  auto budget = [](const nlohmann::json& b, Budget out) {
    if (!b.is_object()) throw std::invalid_argument("budget must be an object");
    for (const auto& [k, v] : b.items()) {
      if (k == "restarts") out.restarts = v.get<std::size_t>();
      else if (k == "evaluations") out.evaluations = v.get<std::size_t>();
      else throw std::invalid_argument("unknown budget key '" + k + "'");
    }
    return out;
  };
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "t_min") base.t_min = v.get<double>();
      else if (k == "t_max") base.t_max = v.get<double>();
      else if (k == "t_step") base.t_step = v.get<double>();
      else if (k == "scenarios") {
        base.scenarios.clear();
        for (const auto& s : v) base.scenarios.push_back(parse_problem_kind(s.get<std::string>()));
      } else if (k == "unitary_family") base.family = parse_unitary_family(v.get<std::string>());
      else if (k == "n_states") base.n_states = v.get<std::size_t>();
      else if (k == "n_bound_runs") base.n_bound_runs = v.get<std::size_t>();
      else if (k == "master_seed") base.master_seed = v.get<std::uint64_t>();
      else if (k == "h") base.h = v.get<double>();
      else if (k == "point_budget") base.point_budget = budget(v, base.point_budget);
      else if (k == "cloud_budget") base.cloud_budget = budget(v, base.cloud_budget);
      else if (k == "bound_budget") base.bound_budget = budget(v, base.bound_budget);
      else if (k == "workers") base.workers = v.get<std::size_t>();
      else throw std::invalid_argument("unknown config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  return base;
}

namespace detail {

inline nlohmann::json json_real(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace detail

inline nlohmann::json to_json(std::vector<SweepRecord> records, const SweepMetadata& meta) {
  sort_records(records);
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRecord& r : records) {
    rows.push_back({{"temperature", detail::json_real(r.temperature)},
                    {"scenario", r.scenario},
                    {"unitary_family", r.unitary_family},
                    {"state_index", r.state_index ? nlohmann::json(*r.state_index) : nlohmann::json(nullptr)},
                    {"optimal_qfi", detail::json_real(r.optimal_qfi)},
                    {"thermal_qfi_reference", detail::json_real(r.thermal_qfi_reference)},
                    {"cramer_rao_bound", detail::json_real(r.cramer_rao_bound)},
                    {"seed", r.seed},
                    {"restarts", r.restarts},
                    {"evaluations", r.evaluations}});
  }
  nlohmann::json m = {{"config", to_json(meta.config)},
                      {"rng_algorithm", meta.rng_algorithm},
                      {"optimizer", meta.optimizer},
                      {"state_sampling", meta.state_sampling},
                      {"type2_unitary", meta.type2_unitary},
                      {"qfi_pair_threshold", meta.qfi_pair_threshold}};
  return {{"metadata", m}, {"records", rows}};
}

// Doubles are emitted through format_real so JSON and CSV agree digit for digit.
inline std::string to_json_text(const std::vector<SweepRecord>& records, const SweepMetadata& meta) {
  nlohmann::json j = to_json(records, meta);
  for (auto& row : j["records"]) {
    for (const char* key : {"temperature", "optimal_qfi", "thermal_qfi_reference", "cramer_rao_bound"}) {
      if (row[key].is_number_float()) row[key] = nlohmann::json::parse(format_real(row[key].get<double>()));
    }
  }
  return j.dump(2) + "\n";
}

inline std::string render(const std::vector<SweepRecord>& records, OutputFormat format, const SweepMetadata& meta) {
  return format == OutputFormat::csv ? to_csv(records) : to_json_text(records, meta);
}

/// Writes to `path`, or to stdout when the path is empty or "-".
inline void emit_results(const std::vector<SweepRecord>& records, OutputFormat format, const std::string& path,
                         const SweepMetadata& meta = {}) {
  const std::string text = render(records, format, meta);
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace qthermo
