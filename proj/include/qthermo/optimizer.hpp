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
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qthermo/random.hpp"

namespace qthermo {

/// Box-constrained maximization problem. The objective must be total on the
/// box: infeasible points report a negative penalty instead of throwing.
struct OptimizationProblem {
  std::size_t dimension = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<double(std::span<const double>)> objective;
  double penalty = 0.0;  // weight the objective applies to constraint violations, for the record
  std::string name;
  /// Optional start-point distribution for random restarts; uniform in the
  /// box when empty. Must return a point inside the bounds.
  std::function<std::vector<double>(Rng&, std::size_t restart)> draw_start;
};

inline void validate(const OptimizationProblem& p) {
  if (p.lower.size() != p.dimension || p.upper.size() != p.dimension) {
    throw std::invalid_argument("bounds do not match problem dimension");
  }
  for (std::size_t i = 0; i < p.dimension; ++i) {
    if (!std::isfinite(p.lower[i]) || !std::isfinite(p.upper[i]) || !(p.lower[i] <= p.upper[i])) {
      throw std::invalid_argument("inconsistent bounds in coordinate " + std::to_string(i));
    }
  }
  if (!p.objective) throw std::invalid_argument("problem has no objective");
}

struct OptimizerOptions {
  std::size_t restarts = 50;
  std::uint64_t seed = 0;
  std::size_t budget = 5000;  // objective evaluations per restart

  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_edge = 0.05;  // fraction of the box width
  double diameter_tolerance = 1e-9;

  /// When set, restart 0 starts here instead of at a random point.
  std::optional<std::vector<double>> start;

  /// Called after every simplex iteration with the restart's incumbent.
  std::function<void(std::size_t restart, double incumbent)> observer;
};

struct OptimizationResult {
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> best_params;
  std::size_t restarts_used = 0;
  std::size_t evaluations = 0;
  bool converged = false;  // best restart stopped on the diameter test
  std::size_t best_restart = 0;
};

namespace detail {

struct LocalResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  std::size_t evaluations = 0;
  bool converged = false;
};

class NelderMead {
 public:
  NelderMead(const OptimizationProblem& problem, const OptimizerOptions& opt) : p_(problem), o_(opt) {}

  LocalResult run(std::vector<double> start, std::size_t restart) {
    const std::size_t n = p_.dimension;
    LocalResult out;
    evals_ = 0;
    clamp(start);
    if (n == 0) {
      out.value = eval(start);
      out.x = std::move(start);
      out.evaluations = evals_;
      out.converged = true;
      return out;
    }

    // Vertices minimize g = -f.
    std::vector<std::vector<double>> x(n + 1, start);
    std::vector<double> g(n + 1, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
      const double width = p_.upper[i] - p_.lower[i];
      const double step = o_.initial_edge * width;
      x[i + 1][i] += (x[i + 1][i] + step <= p_.upper[i]) ? step : -step;
      clamp(x[i + 1]);
    }
    for (std::size_t k = 0; k <= n && evals_ < o_.budget; ++k) g[k] = -eval(x[k]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto sort_vertices = [&] {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
    };

    bool converged = false;
    while (evals_ < o_.budget) {
      sort_vertices();
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[n - 1];
      if (o_.observer) o_.observer(restart, -g[best]);

      double diameter = 0.0;
      for (std::size_t k = 0; k <= n; ++k) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) d2 += (x[k][i] - x[best][i]) * (x[k][i] - x[best][i]);
        diameter = std::max(diameter, std::sqrt(d2));
      }
      if (diameter < o_.diameter_tolerance) {
        converged = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k <= n; ++k) {
        if (k == worst) continue;
        for (std::size_t i = 0; i < n; ++i) centroid[i] += x[k][i];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + o_.reflection * (centroid[i] - x[worst][i]);
      clamp(xr);
      const double gr = -eval(xr);

      if (gr < g[best]) {
        if (evals_ >= o_.budget) {
          accept(x[worst], g[worst], xr, gr);
          break;
        }
        for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + o_.expansion * (xr[i] - centroid[i]);
        clamp(xe);
        const double ge = -eval(xe);
        if (ge < gr) {
          accept(x[worst], g[worst], xe, ge);
        } else {
          accept(x[worst], g[worst], xr, gr);
        }
        continue;
      }
      if (gr < g[second]) {
        accept(x[worst], g[worst], xr, gr);
        continue;
      }
      if (evals_ >= o_.budget) break;

      if (gr < g[worst]) {
        for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + o_.contraction * (xr[i] - centroid[i]);
        clamp(xc);
        const double gc = -eval(xc);
        if (gc <= gr) {
          accept(x[worst], g[worst], xc, gc);
          continue;
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + o_.contraction * (x[worst][i] - centroid[i]);
        clamp(xc);
        const double gc = -eval(xc);
        if (gc < g[worst]) {
          accept(x[worst], g[worst], xc, gc);
          continue;
        }
      }

      for (std::size_t k = 0; k <= n && evals_ < o_.budget; ++k) {
        if (k == best) continue;
        for (std::size_t i = 0; i < n; ++i) x[k][i] = x[best][i] + o_.shrink * (x[k][i] - x[best][i]);
        clamp(x[k]);
        g[k] = -eval(x[k]);
      }
    }

    sort_vertices();
    out.value = -g[order.front()];
    out.x = x[order.front()];
    out.evaluations = evals_;
    out.converged = converged;
    if (o_.observer) o_.observer(restart, out.value);
    return out;
  }

 private:
  void clamp(std::vector<double>& v) const {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], p_.lower[i], p_.upper[i]);
  }

  double eval(const std::vector<double>& v) {
    ++evals_;
    const double f = p_.objective(std::span<const double>(v));
    return std::isnan(f) ? -std::numeric_limits<double>::infinity() : f;
  }

  static void accept(std::vector<double>& slot, double& slot_value, const std::vector<double>& v, double value) {
    slot = v;
    slot_value = value;
  }

  const OptimizationProblem& p_;
  const OptimizerOptions& o_;
  std::size_t evals_ = 0;
};

}  // namespace detail

/// Random start from the restart's own stream: the problem's draw_start if
/// set, else uniform in the box.
inline std::vector<double> random_start(const OptimizationProblem& p, std::uint64_t seed, std::size_t restart) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(restart)}));
  if (p.draw_start) {
    std::vector<double> x = p.draw_start(rng, restart);
    if (x.size() != p.dimension) throw std::logic_error("draw_start returned a point of the wrong dimension");
    return x;
  }
  std::vector<double> x(p.dimension);
  for (std::size_t i = 0; i < p.dimension; ++i) x[i] = rng.uniform(p.lower[i], p.upper[i]);
  return x;
}

/// Multistart Nelder-Mead maximization. Each restart runs until its simplex
/// diameter drops below the tolerance or it has spent `budget` evaluations.
/// The best restart wins; ties go to the lower restart index.
inline OptimizationResult optimize(const OptimizationProblem& problem, const OptimizerOptions& options) {
  validate(problem);
  if (options.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (options.budget < 1) throw std::invalid_argument("budget must be at least 1");
  if (options.start && options.start->size() != problem.dimension) {
    throw std::invalid_argument("start point does not match problem dimension");
  }

  OptimizationResult result;
  detail::NelderMead nm(problem, options);
  for (std::size_t r = 0; r < options.restarts; ++r) {
    std::vector<double> start;
    if (r == 0 && options.start) start = *options.start;
    else start = random_start(problem, options.seed, r);
    detail::LocalResult local = nm.run(std::move(start), r);
    result.evaluations += local.evaluations;
    ++result.restarts_used;
    if (local.value > result.best_value || result.best_params.empty()) {
      result.best_value = local.value;
      result.best_params = std::move(local.x);
      result.converged = local.converged;
      result.best_restart = r;
    }
  }
  return result;
}

inline OptimizationResult optimize(const OptimizationProblem& problem, std::size_t restarts, std::uint64_t seed,
                                   std::size_t budget) {
  OptimizerOptions options;
  options.restarts = restarts;
  options.seed = seed;
  options.budget = budget;
  return optimize(problem, options);
}

}  // namespace qthermo
