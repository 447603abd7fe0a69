#include <cstdlib>
#include <string>

#include "gridscale/simd/kernels.hpp"

namespace gridscale::simd {

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("GRIDSCALE_SIMD");
    if (env && std::string(env) == "scalar") return Isa::scalar;
    return avx2_available() ? Isa::avx2 : Isa::scalar;
  }();
  return isa;
}

double max_abs(const double* v, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::max_abs(v, n) : scalar::max_abs(v, n);
}

void discretize(const double* v, std::size_t n, double m, int bins, std::int32_t* out) {
  if (active_isa() == Isa::avx2) {
    avx2::discretize(v, n, m, bins, out);
  } else {
    scalar::discretize(v, n, m, bins, out);
  }
}

void undiscretize(const std::int32_t* k, std::size_t n, double m, int bins, double* out) {
  if (active_isa() == Isa::avx2) {
    avx2::undiscretize(k, n, m, bins, out);
  } else {
    scalar::undiscretize(k, n, m, bins, out);
  }
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::squared_l2(a, b, n) : scalar::squared_l2(a, b, n);
}

}  // namespace gridscale::simd
