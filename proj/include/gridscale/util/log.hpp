#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace gridscale::util {

/// Process-wide logger writing to stderr. The level comes from the
/// GRIDSCALE_LOG environment variable (trace, debug, info, warn, error, off);
/// default is warn.
std::shared_ptr<spdlog::logger> logger();

}  // namespace gridscale::util
