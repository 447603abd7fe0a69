#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "gridscale/grid/case.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::scenario {

enum class FaultType { three_phase_ground, single_line_ground, line_to_line, double_line_ground, branch_trip };
enum class LocationKind { bus, branch };

inline constexpr FaultType all_fault_types[] = {FaultType::three_phase_ground, FaultType::single_line_ground,
                                                FaultType::line_to_line, FaultType::double_line_ground,
                                                FaultType::branch_trip};

std::string_view to_string(FaultType type);
FaultType parse_fault_type(std::string_view text);
/// Phrase used in question/answer text, e.g. "three-phase-to-ground".
std::string_view display_name(FaultType type);
FaultType parse_display_name(std::string_view text);

struct FaultDescriptor {
  FaultType type = FaultType::three_phase_ground;
  LocationKind kind = LocationKind::bus;
  int location = 0;  ///< bus id, or branch index into NetworkCase::branches()
  double t_fault = 0.5;
  double t_clear = 0.6;

  bool operator==(const FaultDescriptor&) const = default;
};

/// Throws InvariantError unless t_fault < t_clear and the location exists.
void check(const FaultDescriptor& fault, const grid::NetworkCase& network);

util::Json to_json(const FaultDescriptor& fault);
FaultDescriptor fault_from_json(const util::Json& j);

/// Where one fault type may be placed. Short-circuits on a branch sit at its
/// midpoint. `branches` caps how many in-service branches (in case order)
/// are used.
struct FaultTypePolicy {
  bool buses = false;
  std::size_t branches = 0;

  bool operator==(const FaultTypePolicy&) const = default;
};

struct FaultPolicy {
  FaultTypePolicy three_phase_ground{true, 0};
  FaultTypePolicy single_line_ground{true, 0};
  FaultTypePolicy line_to_line{true, 0};
  FaultTypePolicy double_line_ground{true, 0};
  FaultTypePolicy branch_trip{false, std::numeric_limits<std::size_t>::max()};
  double t_fault = 0.5;
  double t_clear = 0.6;

  const FaultTypePolicy& of(FaultType type) const;
  FaultTypePolicy& of(FaultType type);

  static FaultPolicy from_json(const util::Json& j);
  util::Json to_json() const;

  bool operator==(const FaultPolicy&) const = default;
};

/// Type-major enumeration: for each type, its buses in case order, then its
/// branches in case order. Branch trips ignore `buses`.
std::vector<FaultDescriptor> enumerate_fault_scenarios(const grid::NetworkCase& network, const FaultPolicy& policy);

}  // namespace gridscale::scenario
