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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qthermo/channels.hpp"
#include "qthermo/fisher.hpp"
#include "qthermo/optimizer.hpp"
#include "qthermo/parallel.hpp"
#include "qthermo/scenarios.hpp"
#include "qthermo/states.hpp"

namespace qthermo {

struct Budget {
  std::size_t restarts = 50;
  std::size_t evaluations = 5000;  // per restart
};

/// Temperature sweep over one unitary family.
///
/// Scenario semantics:
///   cptp, ncptp1   one optimized record per temperature
///   ncptp2         n_states records per temperature, one per sampled joint
///                  state; the same states are used at every temperature
///   ncptp2-bound   n_bound_runs independent joint-state optimizations per
///                  temperature, emitted individually ("ncptp2-bound-run")
///                  and as their mean ("ncptp2-bound")
struct SweepConfig {
  double t_min = 1.0;
  double t_max = 2.0;
  double t_step = 0.01;
  std::vector<ProblemKind> scenarios{ProblemKind::cptp, ProblemKind::ncptp1, ProblemKind::ncptp2,
                                     ProblemKind::ncptp2_bound};
  UnitaryFamily family = UnitaryFamily::general;
  std::size_t n_states = 100;
  std::size_t n_bound_runs = 10;
  std::uint64_t master_seed = 2026;
  double h = 0.001;
  Budget point_budget{50, 5000};
  Budget cloud_budget{8, 2000};
  Budget bound_budget{20, 5000};
  std::size_t workers = 1;
};

inline void validate(const SweepConfig& c) {
  if (!(c.t_step > 0.0) || !std::isfinite(c.t_step)) throw std::invalid_argument("t_step must be positive");
  if (!(c.t_min <= c.t_max)) throw std::invalid_argument("t_min must not exceed t_max");
  if (!(c.h > 0.0)) throw std::invalid_argument("stencil step h must be positive");
  if (!(c.t_min - 2.0 * c.h > 0.0)) throw std::invalid_argument("t_min - 2h must be positive");
  if (c.scenarios.empty()) throw std::invalid_argument("no scenarios selected");
  for (const Budget& b : {c.point_budget, c.cloud_budget, c.bound_budget}) {
    if (b.restarts < 1 || b.evaluations < 1) throw std::invalid_argument("optimizer budgets must be positive");
  }
  for (ProblemKind k : c.scenarios) {
    if (k == ProblemKind::ncptp2 && c.n_states == 0) throw std::invalid_argument("ncptp2 needs n_states >= 1");
    if (k == ProblemKind::ncptp2_bound && c.n_bound_runs == 0) {
      throw std::invalid_argument("ncptp2-bound needs n_bound_runs >= 1");
    }
  }
}

/// t_min, t_min + step, ... up to t_max (inclusive, with 1e-9 slack).
inline std::vector<double> temperature_grid(const SweepConfig& c) {
  const auto n = static_cast<std::size_t>(std::floor((c.t_max - c.t_min) / c.t_step + 1e-9));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = c.t_min + static_cast<double>(i) * c.t_step;
  return grid;
}

inline constexpr const char* kBoundRunScenario = "ncptp2-bound-run";

struct SweepRecord {
  double temperature = 0.0;
  std::string scenario;
  std::string unitary_family;
  std::optional<std::size_t> state_index;
  double optimal_qfi = 0.0;
  double thermal_qfi_reference = 0.0;
  double cramer_rao_bound = 0.0;
  std::uint64_t seed = 0;
  std::size_t restarts = 0;
  std::size_t evaluations = 0;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

/// (temperature, scenario, state_index) with a missing index first.
inline bool record_less(const SweepRecord& a, const SweepRecord& b) {
  auto key = [](const SweepRecord& r) {
    return std::make_tuple(r.temperature, r.scenario, r.state_index.has_value(), r.state_index.value_or(0));
  };
  return key(a) < key(b);
}

inline void sort_records(std::vector<SweepRecord>& records) {
  std::stable_sort(records.begin(), records.end(), record_less);
}

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

enum : std::uint64_t { kStreamState = 1, kStreamPoint = 2, kStreamCloud = 3, kStreamBound = 4 };

inline SweepRecord make_record(double t, std::string scenario, UnitaryFamily family, std::optional<std::size_t> idx,
                               double value, std::uint64_t seed, std::size_t restarts, std::size_t evaluations) {
  SweepRecord r;
  r.temperature = t;
  r.scenario = std::move(scenario);
  r.unitary_family = std::string(to_string(family));
  r.state_index = idx;
  r.optimal_qfi = value;
  r.thermal_qfi_reference = qfi_thermal_closed_form(t);
  r.cramer_rao_bound = value > 0.0 ? cramer_rao_bound(value) : std::numeric_limits<double>::infinity();
  r.seed = seed;
  r.restarts = restarts;
  r.evaluations = evaluations;
  return r;
}

inline void check_record(const SweepRecord& r) {
  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "record failed invariants (" << why << "): T = " << r.temperature << ", scenario = " << r.scenario
       << ", family = " << r.unitary_family << ", seed = " << r.seed;
    if (r.state_index) os << ", index = " << *r.state_index;
    throw SweepError(os.str());
  };
  if (!std::isfinite(r.optimal_qfi) || r.optimal_qfi < 0.0) fail("optimal QFI not a finite non-negative value");
  if (std::abs(r.thermal_qfi_reference - qfi_thermal_closed_form(r.temperature)) > 1e-10) {
    fail("thermal reference mismatch");
  }
}

// Penalized objectives can only return a negative value at infeasible points,
// so the strict re-validation is: recompute the stencil-window eigenvalue.
inline void revalidate_state(const std::vector<double>& x, double t, const StencilConfig& cfg) {
  const double m = stencil_min_eigenvalue(decode_state(x), t, cfg);
  if (m < -kStateTolerance) throw PositivityError(m);
}

}  // namespace detail

/// States shared by every temperature of a sweep: valid over the whole grid
/// including the stencil overhang.
inline std::vector<TwoQubitStateParams> sample_state_cloud(const SweepConfig& c) {
  std::vector<TwoQubitStateParams> states(c.n_states);
  const SamplingWindow window{c.t_min, c.t_max, c.h};
  parallel_for(c.n_states, c.workers, [&](std::size_t k) {
    states[k] = sample_constrained_state(derive_seed(c.master_seed, {detail::kStreamState, k}), window).params;
  });
  return states;
}

/// Runs the configured sweep. Output is sorted and does not depend on the
/// worker count.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& c,
                                          const std::vector<TwoQubitStateParams>* cloud_override = nullptr) {
  validate(c);
  const std::vector<double> grid = temperature_grid(c);
  const StencilConfig cfg{c.h};
  const auto family = c.family;

  const bool wants_cloud =
      std::find(c.scenarios.begin(), c.scenarios.end(), ProblemKind::ncptp2) != c.scenarios.end();
  std::vector<TwoQubitStateParams> cloud;
  if (wants_cloud) {
    if (cloud_override) {
      if (cloud_override->size() < c.n_states) throw std::invalid_argument("state cloud smaller than n_states");
      cloud.assign(cloud_override->begin(), cloud_override->begin() + static_cast<std::ptrdiff_t>(c.n_states));
    } else {
      cloud = sample_state_cloud(c);
    }
  }

  struct Item {
    std::size_t t_index;
    ProblemKind kind;
    std::optional<std::size_t> index;
  };
  std::vector<Item> items;
  for (std::size_t ti = 0; ti < grid.size(); ++ti) {
    for (ProblemKind k : c.scenarios) {
      switch (k) {
        case ProblemKind::cptp:
        case ProblemKind::ncptp1: items.push_back({ti, k, std::nullopt}); break;
        case ProblemKind::ncptp2:
          for (std::size_t s = 0; s < c.n_states; ++s) items.push_back({ti, k, s});
          break;
        case ProblemKind::ncptp2_bound:
          for (std::size_t j = 0; j < c.n_bound_runs; ++j) items.push_back({ti, k, j});
          break;
      }
    }
  }

  std::vector<SweepRecord> out(items.size());
  parallel_for(items.size(), c.workers, [&](std::size_t n) {
    const Item& it = items[n];
    const double t = grid[it.t_index];
    const auto ti = static_cast<std::uint64_t>(it.t_index);
    const auto kind_code = static_cast<std::uint64_t>(it.kind);
    ScenarioOptions opt;
    opt.stencil = cfg;

    OptimizerOptions oo;
    std::string scenario(to_string(it.kind));
    bool check_state = false;
    switch (it.kind) {
      case ProblemKind::cptp:
      case ProblemKind::ncptp1:
        oo.seed = derive_seed(c.master_seed, {detail::kStreamPoint, kind_code, ti});
        oo.restarts = c.point_budget.restarts;
        oo.budget = c.point_budget.evaluations;
        break;
      case ProblemKind::ncptp2:
        // One optimizer stream per state, shared by every temperature.
        oo.seed = derive_seed(c.master_seed, {detail::kStreamCloud, *it.index});
        opt.state = cloud[*it.index];
        oo.restarts = c.cloud_budget.restarts;
        if (is_fixed(family)) {
          // The unitary is fixed, so the search runs over the state
          // parameters, starting from the sampled state.
          oo.start = encode_state(cloud[*it.index]);
          check_state = true;
        }
        oo.budget = c.cloud_budget.evaluations;
        break;
      case ProblemKind::ncptp2_bound:
        oo.seed = derive_seed(c.master_seed, {detail::kStreamBound, ti, *it.index});
        oo.restarts = c.bound_budget.restarts;
        oo.budget = c.bound_budget.evaluations;
        scenario = kBoundRunScenario;
        check_state = true;
        break;
    }

    const OptimizationProblem prob = scenario_problem(it.kind, family, t, opt);
    const OptimizationResult res = optimize(prob, oo);
    if (check_state) {
      try {
        detail::revalidate_state(res.best_params, t, cfg);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "optimum failed positivity re-validation: T = " << t << ", scenario = " << scenario
           << ", seed = " << oo.seed << ": " << e.what();
        throw SweepError(os.str());
      }
    }
    out[n] = detail::make_record(t, scenario, family, it.index, res.best_value, oo.seed, res.restarts_used,
                                 res.evaluations);
    detail::check_record(out[n]);
  });

  // Averaged bound per temperature.
  if (std::find(c.scenarios.begin(), c.scenarios.end(), ProblemKind::ncptp2_bound) != c.scenarios.end()) {
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
      double sum = 0.0;
      std::size_t restarts = 0;
      std::size_t evaluations = 0;
      std::size_t count = 0;
      for (std::size_t n = 0; n < items.size(); ++n) {
        if (items[n].t_index != ti || items[n].kind != ProblemKind::ncptp2_bound) continue;
        sum += out[n].optimal_qfi;
        restarts += out[n].restarts;
        evaluations += out[n].evaluations;
        ++count;
      }
      const std::uint64_t seed = derive_seed(c.master_seed, {detail::kStreamBound, ti});
      SweepRecord avg = detail::make_record(grid[ti], std::string(to_string(ProblemKind::ncptp2_bound)), family,
                                            std::nullopt, sum / static_cast<double>(count), seed, restarts,
                                            evaluations);
      detail::check_record(avg);
      out.push_back(std::move(avg));
    }
  }

  sort_records(out);
  return out;
}

}  // namespace qthermo
