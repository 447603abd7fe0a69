#include "gridscale/codec/codec.hpp"

#include <cmath>
#include <string>

#include "gridscale/error.hpp"
#include "gridscale/simd/kernels.hpp"

namespace gridscale::codec {

void CodecConfig::check() const {
  if (bins < 2 || bins % 2 != 0) throw Error("codec bins must be even and >= 2, got " + std::to_string(bins));
}

namespace {

void require_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw Error("discretize: non-finite value at index " + std::to_string(i));
  }
}

}  // namespace

Discretized discretize(std::span<const double> values, const CodecConfig& config) {
  config.check();
  if (values.empty()) throw Error("discretize: empty vector");
  require_finite(values);
  Discretized out;
  out.max_abs = simd::max_abs(values.data(), values.size());
  out.bins.resize(values.size());
  simd::discretize(values.data(), values.size(), out.max_abs, config.bins, out.bins.data());
  return out;
}

std::vector<std::int32_t> discretize_with(std::span<const double> values, double max_abs,
                                          const CodecConfig& config) {
  config.check();
  if (!(std::isfinite(max_abs) && max_abs >= 0)) throw Error("discretize: |v|max must be finite and >= 0");
  require_finite(values);
  std::vector<std::int32_t> bins(values.size());
  simd::discretize(values.data(), values.size(), max_abs, config.bins, bins.data());
  return bins;
}

std::vector<double> undiscretize(std::span<const std::int32_t> bins, double max_abs, const CodecConfig& config) {
  config.check();
  if (!(std::isfinite(max_abs) && max_abs >= 0)) throw Error("undiscretize: |v|max must be finite and >= 0");
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i] < 0 || bins[i] >= config.bins) {
      throw Error("undiscretize: bin " + std::to_string(bins[i]) + " at index " + std::to_string(i) +
                  " outside [0, " + std::to_string(config.bins - 1) + "]");
    }
  }
  std::vector<double> out(bins.size());
  simd::undiscretize(bins.data(), bins.size(), max_abs, config.bins, out.data());
  return out;
}

std::vector<double> quantize(std::span<const double> values, const CodecConfig& config) {
  auto d = discretize(values, config);
  return undiscretize(d.bins, d.max_abs, config);
}

}  // namespace gridscale::codec
