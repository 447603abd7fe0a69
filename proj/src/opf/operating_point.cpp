#include "gridscale/opf/operating_point.hpp"

#include <algorithm>

namespace gridscale::opf {

OperatingPoint OperatingPoint::from_case(const grid::NetworkCase& network) {
  OperatingPoint op{network, {}, {}};
  for (const auto& g : network.generators()) {
    op.p_upper.push_back(g.p_max);
    op.prev_status.push_back(g.in_service);
  }
  return op;
}

std::vector<std::size_t> decision_units(const grid::NetworkCase& network) {
  std::vector<std::size_t> out;
  const auto& gens = network.generators();
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (gens[g].in_service && g != network.balancing_generator()) out.push_back(g);
  }
  return out;
}

std::vector<double> proportional_dispatch(const OperatingPoint& op) {
  const auto& gens = op.network.generators();
  std::vector<double> p(gens.size(), 0.0);
  double load = 0.0;
  for (const auto& b : op.network.buses()) load += b.load_p;
  double remaining = 1.02 * load;
  double floor_sum = 0.0, range_sum = 0.0;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (!gens[g].in_service) continue;
    if (grid::is_renewable(gens[g].kind)) {
      p[g] = std::max(gens[g].p_min, op.p_upper[g]);
      remaining -= p[g];
    } else {
      floor_sum += gens[g].p_min;
      range_sum += op.p_upper[g] - gens[g].p_min;
    }
  }
  double lambda = range_sum > 0 ? std::clamp((remaining - floor_sum) / range_sum, 0.0, 1.0) : 0.0;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (gens[g].in_service && !grid::is_renewable(gens[g].kind)) {
      p[g] = gens[g].p_min + lambda * (op.p_upper[g] - gens[g].p_min);
    }
  }
  return p;
}

}  // namespace gridscale::opf
