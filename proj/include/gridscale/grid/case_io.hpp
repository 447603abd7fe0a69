#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gridscale/grid/case.hpp"

namespace gridscale::grid {

enum class CaseFormat { native_json, matpower };

/// Parses case text. Syntax problems throw ParseError with line/column;
/// invariant violations throw InvariantError.
///
/// MATPOWER import reads baseMVA and the bus/gen/branch/gencost tables only
/// (polynomial costs up to quadratic). Conventions applied on import:
///  - the first in-service generator on the slack bus becomes the balancing unit,
///    all others are thermal;
///  - a zero rateA (unlimited) becomes `unlimited_rate_mva`;
///  - a nonpositive baseKV becomes 1 kV;
///  - a zero tap ratio means 1.
NetworkCase parse_case(std::string_view source, CaseFormat format, std::string_view fallback_name = "case");

/// Native JSON text (schema "gridcase/1"). parse_case of the result yields an
/// equal case, and serializing that again gives identical bytes.
std::string serialize_case(const NetworkCase& network);

/// Picks the format from the extension: ".m" is MATPOWER, anything else JSON.
NetworkCase load_case(const std::filesystem::path& path);

inline constexpr double unlimited_rate_mva = 9900.0;

}  // namespace gridscale::grid
