#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel kernels behind the float codec and the error metrics. Each
// kernel has a scalar reference and an AVX2 variant; the dispatched entry
// points pick one at first use. Both variants perform the same IEEE
// operations in the same order, so their results are bit-identical.
//
// GRIDSCALE_SIMD=scalar in the environment forces the scalar path.

namespace gridscale::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Variant used by the dispatched entry points.
Isa active_isa();

/// True when the CPU can run the AVX2 variants.
bool avx2_available();

/// max |v_i|, 0 for n == 0. Inputs must be finite.
double max_abs(const double* v, std::size_t n);

/// Bin k = max{k in [0, bins-1] : undiscretize(k) <= v_i}, i.e. the floor
/// rule with its floating-point rounding corrected and the top edge clamped.
/// max_abs == 0 maps everything to bins/2.
void discretize(const double* v, std::size_t n, double max_abs, int bins, std::int32_t* out);

/// (2k/bins - 1) * max_abs, exactly +0.0 when max_abs == 0.
void undiscretize(const std::int32_t* k, std::size_t n, double max_abs, int bins, double* out);

/// sum (a_i - b_i)^2 accumulated in four interleaved partial sums.
double squared_l2(const double* a, const double* b, std::size_t n);

namespace scalar {
double max_abs(const double* v, std::size_t n);
void discretize(const double* v, std::size_t n, double max_abs, int bins, std::int32_t* out);
void undiscretize(const std::int32_t* k, std::size_t n, double max_abs, int bins, double* out);
double squared_l2(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
double max_abs(const double* v, std::size_t n);
void discretize(const double* v, std::size_t n, double max_abs, int bins, std::int32_t* out);
void undiscretize(const std::int32_t* k, std::size_t n, double max_abs, int bins, double* out);
double squared_l2(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace gridscale::simd
