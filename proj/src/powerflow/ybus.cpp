#include "gridscale/powerflow/ybus.hpp"

#include <cmath>
#include <numbers>

namespace gridscale::powerflow {

BranchAdmittance branch_admittance(const grid::Branch& br) {
  const Complex ys = 1.0 / Complex(br.r, br.x);
  const Complex ytt = ys + Complex(0.0, br.b / 2.0);
  const Complex tau = std::polar(br.tap, br.shift_deg * std::numbers::pi / 180.0);
  return {ytt / (br.tap * br.tap), -ys / std::conj(tau), -ys / tau, ytt};
}

SparseComplex build_ybus(const grid::NetworkCase& network) {
  const auto n = static_cast<Eigen::Index>(network.bus_count());
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(4 * network.branches().size() + network.bus_count());
  for (const auto& br : network.branches()) {
    if (!br.in_service) continue;
    const auto f = static_cast<Eigen::Index>(network.bus_index(br.from_bus));
    const auto t = static_cast<Eigen::Index>(network.bus_index(br.to_bus));
    const auto y = branch_admittance(br);
    triplets.emplace_back(f, f, y.yff);
    triplets.emplace_back(f, t, y.yft);
    triplets.emplace_back(t, f, y.ytf);
    triplets.emplace_back(t, t, y.ytt);
  }
  const double base = network.base_mva();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& bus = network.buses()[static_cast<std::size_t>(i)];
    triplets.emplace_back(i, i, Complex(bus.shunt_g, bus.shunt_b) / base);
  }
  SparseComplex y(n, n);
  y.setFromTriplets(triplets.begin(), triplets.end());
  y.makeCompressed();
  return y;
}

}  // namespace gridscale::powerflow
