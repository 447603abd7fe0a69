#include "gridscale/scaling/power_law.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

#include "gridscale/error.hpp"

namespace gridscale::scaling {

void ScalingSeries::check() const {
  if (points.size() < 3) throw Error("scaling series '" + metric + "' needs at least 3 points, got " +
                                     std::to_string(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.x) || p.x <= 0) throw Error("scaling point " + std::to_string(i) + ": X must be > 0");
    if (!std::isfinite(p.y) || p.y <= 0) throw Error("scaling point " + std::to_string(i) + ": Y must be > 0");
    if (i > 0 && !(p.x > points[i - 1].x)) {
      throw Error("scaling point " + std::to_string(i) + ": X must be strictly increasing");
    }
  }
}

ScalingFit fit_power_law(const ScalingSeries& series) {
  series.check();
  const std::size_t n = series.points.size();
  std::vector<double> lx(n), ly(n);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(series.points[i].x);
    ly[i] = std::log(series.points[i].y);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lx[i] - mx, dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw Error("scaling series '" + series.metric + "' has no variance in X");

  ScalingFit fit;
  fit.degenerate = syy == 0;
  fit.k = fit.degenerate ? 0.0 : sxy / sxx;
  fit.log_alpha = my - fit.k * mx;
  fit.alpha = std::exp(fit.log_alpha);
  fit.r = fit.degenerate ? 0.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) fit.residuals[i] = ly[i] - (fit.log_alpha + fit.k * lx[i]);
  return fit;
}

double predict(const ScalingFit& fit, double x) { return std::exp(fit.log_alpha + fit.k * std::log(x)); }

Divergence compare_single_vs_multi(const ScalingSeries& single, const ScalingSeries& multi, double threshold) {
  if (single.points.size() != multi.points.size()) throw Error("single and multi series have different grids");
  Divergence d;
  d.threshold = threshold;
  for (std::size_t i = 0; i < single.points.size(); ++i) {
    const auto& s = single.points[i];
    const auto& m = multi.points[i];
    if (s.x != m.x) throw Error("grids differ at point " + std::to_string(i));
    if (s.y <= 0) throw Error("single-task value at point " + std::to_string(i) + " must be > 0");
    d.ratio.push_back(m.y / s.y);
    d.max_relative = std::max(d.max_relative, std::abs(m.y / s.y - 1.0));
  }
  d.within = d.max_relative <= threshold;
  return d;
}

util::Json to_json(const ScalingSeries& series, const ScalingFit& fit) {
  const double ln10 = std::log(10.0);
  util::Json points = util::Json::array();
  for (const auto& p : series.points) points.push_back({{"x", p.x}, {"y", p.y}});
  util::Json residuals = util::Json::array();
  for (double r : fit.residuals) residuals.push_back(r / ln10);
  return {{"metric", series.metric},
          {"direction", series.direction == metrics::Direction::lower_is_better ? "lower" : "higher"},
          {"k", fit.k},
          {"alpha", fit.alpha},
          {"log10_alpha", fit.log_alpha / ln10},
          {"r", fit.r},
          {"degenerate", fit.degenerate},
          {"log10_residuals", residuals},
          {"points", points}};
}

util::Json to_json(const Divergence& d) {
  return {{"ratio", d.ratio}, {"max_relative", d.max_relative}, {"threshold", d.threshold}, {"within", d.within}};
}

std::string to_csv(const ScalingSeries& series, const ScalingFit& fit) {
  std::ostringstream out;
  out << "log10_x,log10_y,log10_fit\n";
  for (const auto& p : series.points) {
    out << util::format_double(std::log10(p.x)) << ',' << util::format_double(std::log10(p.y)) << ','
        << util::format_double(std::log10(predict(fit, p.x))) << '\n';
  }
  return out.str();
}

}  // namespace gridscale::scaling
