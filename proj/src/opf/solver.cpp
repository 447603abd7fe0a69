#include "gridscale/opf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridscale/error.hpp"
#include "gridscale/util/log.hpp"
#include "gridscale/util/parallel.hpp"

namespace gridscale::opf {

std::vector<double> DispatchDecision::setpoints() const {
  std::vector<double> out;
  for (auto g : units) out.push_back(gen_p[g]);
  return out;
}

namespace {

struct Box {
  std::vector<std::size_t> units;
  std::vector<double> lo, hi;
};

Box box_of(const OperatingPoint& op) {
  Box box;
  box.units = decision_units(op.network);
  for (auto g : box.units) {
    const auto& gen = op.network.generators()[g];
    box.lo.push_back(gen.p_min);
    box.hi.push_back(std::max(gen.p_min, op.p_upper[g]));
  }
  return box;
}

class Evaluator {
 public:
  Evaluator(const OperatingPoint& op, const metrics::ScoreOptions& options, const Box& box, unsigned jobs)
      : op_(op), options_(options), box_(box), jobs_(jobs), template_(op.network.generators().size(), 0.0) {}

  std::vector<double> full(const std::vector<double>& x) const {
    auto p = template_;
    for (std::size_t i = 0; i < box_.units.size(); ++i) p[box_.units[i]] = x[i];
    return p;
  }

  metrics::OpfScoreBreakdown score(const std::vector<double>& x) {
    ++count_;
    return metrics::opf_score(full(x), op_, options_, solver_);
  }

  std::vector<metrics::OpfScoreBreakdown> score_all(const std::vector<std::vector<double>>& xs) {
    std::vector<metrics::OpfScoreBreakdown> out(xs.size());
    count_ += xs.size();
    if (jobs_ <= 1) {
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = metrics::opf_score(full(xs[i]), op_, options_, solver_);
    } else {
      util::parallel_for(xs.size(), jobs_, [&](std::size_t i) {
        powerflow::PowerFlowSolver local;
        out[i] = metrics::opf_score(full(xs[i]), op_, options_, local);
      });
    }
    return out;
  }

  std::size_t count() const { return count_; }

 private:
  const OperatingPoint& op_;
  const metrics::ScoreOptions& options_;
  const Box& box_;
  unsigned jobs_;
  std::vector<double> template_;
  powerflow::PowerFlowSolver solver_;
  std::size_t count_ = 0;
};

struct SearchResult {
  std::vector<double> x;
  metrics::OpfScoreBreakdown score;
  std::vector<double> history;
};

SearchResult pattern_search(Evaluator& eval, const Box& box, std::vector<double> x, const OpfOptions& options) {
  const std::size_t n = x.size();
  SearchResult r{x, eval.score(x), {}};
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = options.initial_step_fraction * (box.hi[i] - box.lo[i]);
  auto clamp_into = [&](std::vector<double>& y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(y[i], box.lo[i], box.hi[i]);
  };
  for (;;) {
    double largest = 0.0;
    for (double s : step) largest = std::max(largest, s);
    if (largest < options.min_step_mw || eval.count() >= options.max_evaluations) break;

    std::vector<std::vector<double>> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      if (step[i] < options.min_step_mw) continue;
      for (double sign : {1.0, -1.0}) {
        auto y = r.x;
        y[i] += sign * step[i];
        clamp_into(y);
        if (y != r.x) candidates.push_back(std::move(y));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = std::min(step[i], step[j]);
        if (s < options.min_step_mw) continue;
        for (double sign : {1.0, -1.0}) {
          auto y = r.x;
          y[i] += sign * s;
          y[j] -= sign * s;
          clamp_into(y);
          if (y != r.x) candidates.push_back(std::move(y));
        }
      }
    }
    auto scores = eval.score_all(candidates);
    std::size_t best = candidates.size();
    double best_value = r.score.composite;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (scores[c].composite > best_value) {
        best_value = scores[c].composite;
        best = c;
      }
    }
    if (best < candidates.size()) {
      r.x = candidates[best];
      r.score = scores[best];
    } else {
      for (double& s : step) s *= 0.5;
    }
    r.history.push_back(r.score.composite);
  }
  return r;
}

DispatchDecision finish(const OperatingPoint& op, const Box& box, const std::vector<double>& x,
                        const metrics::OpfScoreBreakdown& score, std::size_t evaluations) {
  DispatchDecision d;
  d.units = box.units;
  d.score = score;
  d.evaluations = evaluations;
  d.gen_p = score.gen_p;
  for (std::size_t i = 0; i < box.units.size(); ++i) d.gen_p[box.units[i]] = x[i];
  d.feasible = score.converged && score.r_balance == 0.0;
  if (!score.converged) {
    d.message = "power flow diverges at the best dispatch found";
  } else if (!d.feasible) {
    const auto& bal = op.network.generators()[op.network.balancing_generator()];
    d.message = "balancing generator outside [" + std::to_string(bal.p_min) + ", " + std::to_string(bal.p_max) +
                "] MW at " + std::to_string(score.gen_p[op.network.balancing_generator()]) + " MW";
  }
  return d;
}

}  // namespace

DispatchDecision solve_opf(const OperatingPoint& op, const OpfOptions& options) {
  Box box = box_of(op);
  Evaluator eval(op, options.score, box, options.jobs);
  const std::size_t n = box.units.size();

  auto warm_full = proportional_dispatch(op);
  std::vector<double> warm;
  for (std::size_t i = 0; i < n; ++i) warm.push_back(std::clamp(warm_full[box.units[i]], box.lo[i], box.hi[i]));

  std::vector<std::vector<double>> starts{warm};
  if (n > 0 && n <= options.multistart_max_units && options.multistart_grid >= 2) {
    std::vector<std::vector<double>> grid_points{{}};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::vector<double>> next;
      for (const auto& prefix : grid_points) {
        for (int k = 0; k < options.multistart_grid; ++k) {
          auto y = prefix;
          y.push_back(box.lo[i] + (box.hi[i] - box.lo[i]) * k / (options.multistart_grid - 1));
          next.push_back(std::move(y));
        }
      }
      grid_points = std::move(next);
    }
    auto scores = eval.score_all(grid_points);
    std::vector<std::size_t> order(grid_points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a].composite > scores[b].composite; });
    for (int k = 0; k < options.multistart_count && k < static_cast<int>(order.size()); ++k) {
      starts.push_back(grid_points[order[k]]);
    }
  }

  SearchResult best;
  bool have = false;
  std::vector<double> history;
  double running = -std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    auto r = pattern_search(eval, box, s, options);
    for (double h : r.history) history.push_back(running = std::max(running, h));
    if (!have || r.score.composite > best.score.composite) {
      best = std::move(r);
      have = true;
    }
  }
  if (!best.score.converged) {
    throw Error("solve_opf: power flow diverges at every candidate dispatch");
  }
  auto d = finish(op, box, best.x, best.score, eval.count());
  d.history = std::move(history);
  if (!d.feasible) util::logger()->info("opf: {}", d.message);
  return d;
}

DispatchDecision brute_force_opf(const OperatingPoint& op, double resolution, const metrics::ScoreOptions& score,
                                 const BruteForceOptions& guard) {
  if (!(resolution > 0)) throw Error("brute_force_opf: resolution must be positive");
  Box box = box_of(op);
  const std::size_t n = box.units.size();
  if (n > guard.max_units) {
    throw Error("brute_force_opf: " + std::to_string(n) + " dispatchable units exceed the guard of " +
                std::to_string(guard.max_units));
  }
  std::vector<std::vector<double>> axes(n);
  double points = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double range = box.hi[i] - box.lo[i];
    const auto steps = static_cast<std::size_t>(std::floor(range / resolution + 1e-9));
    for (std::size_t k = 0; k <= steps; ++k) axes[i].push_back(box.lo[i] + static_cast<double>(k) * resolution);
    if (axes[i].back() < box.hi[i] - 1e-9 * std::max(1.0, range)) axes[i].push_back(box.hi[i]);
    points *= static_cast<double>(axes[i].size());
  }
  if (points > static_cast<double>(guard.max_points)) {
    throw Error("brute_force_opf: grid of " + std::to_string(points) + " points exceeds the guard");
  }

  Evaluator eval(op, score, box, 1);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n), best_x;
  metrics::OpfScoreBreakdown best;
  bool have = false;
  for (bool more = true; more;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = axes[i][idx[i]];
    auto s = eval.score(x);
    if (!have || s.composite > best.composite) {
      best = s;
      best_x = x;
      have = true;
    }
    // Odometer increment, last axis fastest.
    more = false;
    for (std::size_t i = n; i-- > 0;) {
      if (++idx[i] < axes[i].size()) {
        more = true;
        break;
      }
      idx[i] = 0;
    }
  }
  return finish(op, box, best_x, best, eval.count());
}

}  // namespace gridscale::opf
