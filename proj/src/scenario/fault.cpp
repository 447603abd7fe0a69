#include "gridscale/scenario/fault.hpp"

#include "gridscale/error.hpp"

namespace gridscale::scenario {

std::string_view to_string(FaultType type) {
  switch (type) {
    case FaultType::three_phase_ground: return "three_phase_ground";
    case FaultType::single_line_ground: return "single_line_ground";
    case FaultType::line_to_line: return "line_to_line";
    case FaultType::double_line_ground: return "double_line_ground";
    case FaultType::branch_trip: return "branch_trip";
  }
  return "?";
}

FaultType parse_fault_type(std::string_view text) {
  for (auto t : all_fault_types) {
    if (to_string(t) == text) return t;
  }
  throw Error("unknown fault type '" + std::string(text) + "'");
}

std::string_view display_name(FaultType type) {
  switch (type) {
    case FaultType::three_phase_ground: return "three-phase-to-ground";
    case FaultType::single_line_ground: return "single-line-to-ground";
    case FaultType::line_to_line: return "line-to-line";
    case FaultType::double_line_ground: return "double-line-to-ground";
    case FaultType::branch_trip: return "branch trip";
  }
  return "?";
}

FaultType parse_display_name(std::string_view text) {
  for (auto t : all_fault_types) {
    if (display_name(t) == text) return t;
  }
  throw Error("unknown fault name '" + std::string(text) + "'");
}

void check(const FaultDescriptor& fault, const grid::NetworkCase& network) {
  if (!(fault.t_fault < fault.t_clear)) {
    throw InvariantError("t_fault < t_clear",
                         std::to_string(fault.t_fault) + " >= " + std::to_string(fault.t_clear));
  }
  if (fault.kind == LocationKind::bus) {
    if (fault.type == FaultType::branch_trip) throw InvariantError("branch trips sit on branches", "bus location");
    if (!network.find_bus(fault.location)) {
      throw InvariantError("fault location exists", "bus " + std::to_string(fault.location));
    }
  } else {
    if (fault.location < 0 || static_cast<std::size_t>(fault.location) >= network.branches().size()) {
      throw InvariantError("fault location exists", "branch " + std::to_string(fault.location));
    }
  }
}

util::Json to_json(const FaultDescriptor& fault) {
  return {{"type", to_string(fault.type)},
          {"location_kind", fault.kind == LocationKind::bus ? "bus" : "branch"},
          {"location", fault.location},
          {"t_fault", fault.t_fault},
          {"t_clear", fault.t_clear}};
}

FaultDescriptor fault_from_json(const util::Json& j) {
  FaultDescriptor f;
  f.type = parse_fault_type(j.at("type").get<std::string>());
  auto kind = j.at("location_kind").get<std::string>();
  if (kind == "bus") {
    f.kind = LocationKind::bus;
  } else if (kind == "branch") {
    f.kind = LocationKind::branch;
  } else {
    throw Error("unknown fault location kind '" + kind + "'");
  }
  f.location = j.at("location").get<int>();
  f.t_fault = j.at("t_fault").get<double>();
  f.t_clear = j.at("t_clear").get<double>();
  return f;
}

const FaultTypePolicy& FaultPolicy::of(FaultType type) const {
  switch (type) {
    case FaultType::three_phase_ground: return three_phase_ground;
    case FaultType::single_line_ground: return single_line_ground;
    case FaultType::line_to_line: return line_to_line;
    case FaultType::double_line_ground: return double_line_ground;
    case FaultType::branch_trip: return branch_trip;
  }
  throw Error("bad fault type");
}

FaultTypePolicy& FaultPolicy::of(FaultType type) {
  return const_cast<FaultTypePolicy&>(static_cast<const FaultPolicy*>(this)->of(type));
}

namespace {

// "all" or a count.
std::size_t branch_count_from_json(const util::Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "all") return std::numeric_limits<std::size_t>::max();
    throw Error("branches must be a count or \"all\"");
  }
  return j.get<std::size_t>();
}

util::Json branch_count_to_json(std::size_t n) {
  if (n == std::numeric_limits<std::size_t>::max()) return "all";
  return n;
}

}  // namespace

FaultPolicy FaultPolicy::from_json(const util::Json& j) {
  FaultPolicy p;
  for (auto type : all_fault_types) {
    auto key = std::string(to_string(type));
    if (!j.contains(key)) continue;
    const auto& e = j.at(key);
    auto& slot = p.of(type);
    if (e.contains("buses")) slot.buses = e.at("buses").get<bool>();
    if (e.contains("branches")) slot.branches = branch_count_from_json(e.at("branches"));
  }
  if (j.contains("t_fault")) p.t_fault = j.at("t_fault").get<double>();
  if (j.contains("t_clear")) p.t_clear = j.at("t_clear").get<double>();
  if (!(p.t_fault < p.t_clear)) throw InvariantError("t_fault < t_clear", "fault policy");
  return p;
}

util::Json FaultPolicy::to_json() const {
  util::Json j = util::Json::object();
  for (auto type : all_fault_types) {
    const auto& e = of(type);
    j[std::string(to_string(type))] = {{"buses", e.buses}, {"branches", branch_count_to_json(e.branches)}};
  }
  j["t_fault"] = t_fault;
  j["t_clear"] = t_clear;
  return j;
}

std::vector<FaultDescriptor> enumerate_fault_scenarios(const grid::NetworkCase& network, const FaultPolicy& policy) {
  std::vector<FaultDescriptor> out;
  for (auto type : all_fault_types) {
    const auto& e = policy.of(type);
    if (e.buses && type != FaultType::branch_trip) {
      for (const auto& b : network.buses()) {
        out.push_back({type, LocationKind::bus, b.id, policy.t_fault, policy.t_clear});
      }
    }
    std::size_t used = 0;
    const auto& branches = network.branches();
    for (std::size_t k = 0; k < branches.size() && used < e.branches; ++k) {
      if (!branches[k].in_service) continue;
      out.push_back({type, LocationKind::branch, static_cast<int>(k), policy.t_fault, policy.t_clear});
      ++used;
    }
  }
  return out;
}

}  // namespace gridscale::scenario
