#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gridscale::codec {

struct CodecConfig {
  int bins = 1024;  ///< B; even and at least 2

  void check() const;
};

struct Discretized {
  std::vector<std::int32_t> bins;
  double max_abs = 0.0;  ///< 0 marks an all-zero group
};

/// floor((v/|v|max + 1) * B/2), with v = +|v|max clamped to B-1 and the
/// floating-point rounding of the division corrected so that the
/// reconstruction never exceeds v. Throws on empty or non-finite input.
Discretized discretize(std::span<const double> values, const CodecConfig& config = {});

/// Same, against a caller-supplied |v|max (values beyond it clamp to the
/// end bins).
std::vector<std::int32_t> discretize_with(std::span<const double> values, double max_abs,
                                          const CodecConfig& config = {});

/// (2 k / B - 1) * |v|max; exact zeros when |v|max is 0. Throws on bins
/// outside [0, B-1].
std::vector<double> undiscretize(std::span<const std::int32_t> bins, double max_abs, const CodecConfig& config = {});

/// undiscretize(discretize(values)).
std::vector<double> quantize(std::span<const double> values, const CodecConfig& config = {});

/// Width of one bin, 2 |v|max / B. Every reconstruction error lies in
/// [0, bin_width) except at v = +|v|max, where it equals bin_width.
inline double bin_width(double max_abs, const CodecConfig& config = {}) { return 2.0 * max_abs / config.bins; }

}  // namespace gridscale::codec
