#pragma once

#include <string>
#include <vector>

#include "gridscale/metrics/evaluate.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::scaling {

struct ScalingPoint {
  double x = 0;  ///< demonstrations or scenarios
  double y = 0;  ///< metric value, > 0
};

struct ScalingSeries {
  std::string metric;
  metrics::Direction direction = metrics::Direction::lower_is_better;
  std::vector<ScalingPoint> points;

  /// Throws Error naming the first offending index: X not strictly
  /// increasing, X or Y not positive and finite, fewer than 3 points.
  void check() const;
};

/// Y = alpha * X^k fitted as ln Y = k ln X + ln alpha.
struct ScalingFit {
  double k = 0;
  double alpha = 0;
  double log_alpha = 0;  ///< natural log
  double r = 0;          ///< correlation of (ln X, ln Y); 0 when Y is constant
  bool degenerate = false;  ///< constant Y
  std::vector<double> residuals;  ///< ln Y - fitted, per point
};

/// Ordinary least squares on the logs. All-equal X is rejected; constant Y
/// gives k = 0 with `degenerate` set.
ScalingFit fit_power_law(const ScalingSeries& series);

double predict(const ScalingFit& fit, double x);

struct Divergence {
  std::vector<double> ratio;  ///< multi / single, per X
  double max_relative = 0;    ///< max |ratio - 1|
  double threshold = 0;
  bool within = true;
};

/// Pointwise comparison over a shared X grid; throws on mismatched grids.
Divergence compare_single_vs_multi(const ScalingSeries& single, const ScalingSeries& multi, double threshold = 0.1);

/// Base-10 report: k, log10_alpha, r, residuals (log10 units) and the points.
util::Json to_json(const ScalingSeries& series, const ScalingFit& fit);
util::Json to_json(const Divergence& d);
/// log10 X, log10 Y and the fitted log10 Y per point, plot-ready.
std::string to_csv(const ScalingSeries& series, const ScalingFit& fit);

}  // namespace gridscale::scaling
