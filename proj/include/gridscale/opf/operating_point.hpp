#pragma once

#include <vector>

#include "gridscale/grid/case.hpp"

namespace gridscale::opf {

/// A case as seen at one timestep: loads and unit statuses already applied to
/// `network`, plus what the score needs beyond the case itself.
struct OperatingPoint {
  grid::NetworkCase network;
  std::vector<double> p_upper;     ///< per generator: p_max, or availability for renewables
  std::vector<bool> prev_status;   ///< per generator, one step earlier

  /// Base case as its own operating point: p_upper = p_max, statuses unchanged.
  static OperatingPoint from_case(const grid::NetworkCase& network);
};

/// Indices of in-service, non-balancing generators: the OPF decision vector.
std::vector<std::size_t> decision_units(const grid::NetworkCase& network);

/// Renewables at availability, thermal units at a common fraction of their
/// range sized to cover load plus 2 %, balancing unit included in the sum.
/// Full-length vector (off units 0).
std::vector<double> proportional_dispatch(const OperatingPoint& op);

}  // namespace gridscale::opf
