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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qthermo/results_io.hpp"

namespace qthermo {
namespace {

SweepConfig small_config() {
  SweepConfig c;
  c.t_min = 1.0;
  c.t_max = 1.2;
  c.t_step = 0.1;
  c.scenarios = {ProblemKind::cptp, ProblemKind::ncptp1};
  c.point_budget = {2, 300};
  c.cloud_budget = {1, 100};
  c.bound_budget = {2, 200};
  c.n_states = 2;
  c.n_bound_runs = 2;
  return c;
}

TEST(Grid, PointsAndValidation) {
  SweepConfig c;
  EXPECT_EQ(temperature_grid(c).size(), 101u);
  EXPECT_DOUBLE_EQ(temperature_grid(c).back(), 2.0);
  c.t_max = 1.0;
  EXPECT_EQ(temperature_grid(c), std::vector<double>{1.0});
  c.t_step = 0.0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = {};
  c.t_max = 0.5;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = {};
  c.t_min = 0.001;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Csv, EmptyListIsHeaderOnly) {
  EXPECT_EQ(to_csv({}), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(parse_csv(to_csv({})).empty());
}

TEST(Csv, RoundTripIsByteIdentical) {
  std::vector<SweepRecord> recs = run_sweep(small_config());
  ASSERT_EQ(recs.size(), 6u);
  SweepRecord odd = recs.front();
  odd.scenario = "ncptp2";
  odd.state_index = 3;
  recs.push_back(odd);
  const std::string text = to_csv(recs);
  EXPECT_EQ(to_csv(parse_csv(text)), text);
}

TEST(Csv, RowLayout) {
  SweepRecord r;
  r.temperature = 1.0;
  r.scenario = "cptp";
  r.unitary_family = "general";
  r.optimal_qfi = 0.41997434161402608;
  r.thermal_qfi_reference = qfi_thermal_closed_form(1.0);
  r.cramer_rao_bound = cramer_rao_bound(r.optimal_qfi);
  r.seed = 42;
  r.restarts = 50;
  r.evaluations = 12345;
  EXPECT_EQ(to_csv({r}), std::string(kCsvHeader) + "\n1,cptp,general,,0.419974341614,0.419974341614,2.38109784554,42,50,12345\n");
}

TEST(Csv, MalformedInputIsRejected) {
  EXPECT_THROW(parse_csv("temperature\n"), CsvParseError);
  const std::string head = std::string(kCsvHeader) + "\n";
  EXPECT_THROW(parse_csv(head + "1,cptp,general,,x,1,1,1,1,1\n"), CsvParseError);
  EXPECT_THROW(parse_csv(head + "1,cptp,general,,1,1,1,1,1\n"), CsvParseError);
  EXPECT_THROW(parse_csv(head + "1,cptp,general,-2,1,1,1,1,1,1\n"), CsvParseError);
}

TEST(Json, NonFiniteValuesBecomeNull) {
  SweepRecord r;
  r.temperature = 1.0;
  r.scenario = "ncptp2";
  r.unitary_family = "xx";
  r.state_index = 0;
  r.cramer_rao_bound = std::numeric_limits<double>::infinity();
  const nlohmann::json j = to_json(std::vector<SweepRecord>{r}, SweepMetadata{});
  EXPECT_TRUE(j["records"][0]["cramer_rao_bound"].is_null());
  EXPECT_EQ(j["records"][0]["state_index"], 0);
  EXPECT_EQ(j["metadata"]["rng_algorithm"], kRngAlgorithm);
  EXPECT_EQ(j["metadata"]["config"]["t_step"], 0.01);
  const nlohmann::json parsed = nlohmann::json::parse(to_json_text({r}, {}));
  EXPECT_EQ(parsed["records"].size(), 1u);
}

TEST(Json, ConfigOverlay) {
  const auto j = nlohmann::json::parse(
      R"({"t_min": 1.5, "scenarios": ["cptp", "ncptp2-bound"], "unitary_family": "xy",
          "cloud_budget": {"restarts": 3}, "workers": 2})");
  const SweepConfig c = sweep_config_from_json(j);
  EXPECT_EQ(c.t_min, 1.5);
  EXPECT_EQ(c.t_max, 2.0);
  EXPECT_EQ(c.scenarios, (std::vector<ProblemKind>{ProblemKind::cptp, ProblemKind::ncptp2_bound}));
  EXPECT_EQ(c.family, UnitaryFamily::xy);
  EXPECT_EQ(c.cloud_budget.restarts, 3u);
  EXPECT_EQ(c.cloud_budget.evaluations, 2000u);
  EXPECT_EQ(c.workers, 2u);
  EXPECT_THROW(sweep_config_from_json(nlohmann::json::parse(R"({"tmin": 1})")), std::invalid_argument);
  EXPECT_THROW(sweep_config_from_json(nlohmann::json::parse(R"({"t_min": "hot"})")), std::invalid_argument);
  EXPECT_THROW(sweep_config_from_json(nlohmann::json::parse("[1]")), std::invalid_argument);
  const SweepConfig back = sweep_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Sweep, SingleCptpPoint) {
  SweepConfig c = small_config();
  c.t_max = 1.0;
  c.scenarios = {ProblemKind::cptp};
  c.point_budget = {6, 2000};
  const auto recs = run_sweep(c);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].scenario, "cptp");
  EXPECT_EQ(recs[0].unitary_family, "general");
  EXPECT_FALSE(recs[0].state_index.has_value());
  EXPECT_EQ(recs[0].restarts, 6u);
  EXPECT_LT(std::abs(recs[0].optimal_qfi - 0.419974) / 0.419974, 0.01);
  EXPECT_DOUBLE_EQ(recs[0].cramer_rao_bound, 1.0 / recs[0].optimal_qfi);
}

TEST(Sweep, DeterministicAcrossRunsAndWorkers) {
  SweepConfig c = small_config();
  const std::string a = to_csv(run_sweep(c));
  const std::string b = to_csv(run_sweep(c));
  c.workers = 3;
  const std::string d = to_csv(run_sweep(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  c.master_seed = 7;
  EXPECT_NE(to_csv(run_sweep(c)), a);
}

TEST(Sweep, CloudAndBoundRecords) {
  SweepConfig c = small_config();
  c.t_max = 1.1;
  c.scenarios = {ProblemKind::ncptp2, ProblemKind::ncptp2_bound};
  const std::vector<TwoQubitStateParams> cloud(3);
  const auto recs = run_sweep(c, &cloud);
  // Per T: 2 cloud, 2 bound runs, 1 averaged bound.
  ASSERT_EQ(recs.size(), 10u);
  std::size_t runs = 0, avgs = 0, states = 0;
  for (const SweepRecord& r : recs) {
    if (r.scenario == kBoundRunScenario) ++runs;
    if (r.scenario == "ncptp2-bound") {
      ++avgs;
      EXPECT_FALSE(r.state_index.has_value());
    }
    if (r.scenario == "ncptp2") ++states;
  }
  EXPECT_EQ(runs, 4u);
  EXPECT_EQ(avgs, 2u);
  EXPECT_EQ(states, 4u);
  const std::vector<TwoQubitStateParams> tiny(1);
  EXPECT_THROW(run_sweep(c, &tiny), std::invalid_argument);
}

TEST(Sweep, FixedFamilyCloudStaysFeasible) {
  SweepConfig c = small_config();
  c.t_max = 1.0;
  c.family = UnitaryFamily::xx;
  c.scenarios = {ProblemKind::ncptp2};
  c.cloud_budget = {5, 400};
  const std::vector<TwoQubitStateParams> cloud(2);
  for (const SweepRecord& r : run_sweep(c, &cloud)) {
    EXPECT_EQ(r.restarts, 5u);
    EXPECT_GE(r.optimal_qfi, 0.0);
  }
}

TEST(Sweep, RejectsBadConfig) {
  SweepConfig c = small_config();
  c.scenarios.clear();
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
  c = small_config();
  c.point_budget.restarts = 0;
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
}

TEST(Output, FormatsAndFiles) {
  EXPECT_EQ(parse_output_format("json"), OutputFormat::json);
  EXPECT_THROW(parse_output_format("xml"), std::invalid_argument);
  EXPECT_THROW(emit_results({}, OutputFormat::csv, "/nonexistent-dir/out.csv"), std::runtime_error);
}

}  // namespace
}  // namespace qthermo
