#include "gridscale/util/log.hpp"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace gridscale::util {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::stderr_color_mt("gridscale");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GRIDSCALE_LOG")) {
      l->set_level(spdlog::level::from_str(env));
    }
    return l;
  }();
  return instance;
}

}  // namespace gridscale::util
