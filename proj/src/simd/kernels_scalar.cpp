#include <cmath>

#include "gridscale/simd/kernels.hpp"

namespace gridscale::simd::scalar {

double max_abs(const double* v, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::fabs(v[i]);
    m = a > m ? a : m;
  }
  return m;
}

namespace {

inline double level(double k, double bins, double m) { return (2.0 * k / bins - 1.0) * m; }

inline std::int32_t bin_of(double v, double m, double bins, double half) {
  const double top = bins - 1.0;
  double k = std::floor((v / m + 1.0) * half);
  k = std::fmin(std::fmax(k, 0.0), top);
  if (level(k, bins, m) > v) k = std::fmax(k - 1.0, 0.0);
  double up = k + 1.0;
  if (up <= top && level(up, bins, m) <= v) k = up;
  return static_cast<std::int32_t>(k);
}

}  // namespace

void discretize(const double* v, std::size_t n, double m, int bins, std::int32_t* out) {
  const double b = bins;
  const double half = 0.5 * b;
  if (m == 0.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = bins / 2;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = bin_of(v[i], m, b, half);
}

void undiscretize(const std::int32_t* k, std::size_t n, double m, int bins, double* out) {
  const double b = bins;
  if (m == 0.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = level(static_cast<double>(k[i]), b, m);
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    lane[i & 3] += d * d;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace gridscale::simd::scalar
