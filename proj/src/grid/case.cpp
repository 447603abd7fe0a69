#include "gridscale/grid/case.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gridscale/error.hpp"

namespace gridscale::grid {

std::string_view to_string(BusKind kind) {
  switch (kind) {
    case BusKind::slack: return "slack";
    case BusKind::pv: return "PV";
    case BusKind::pq: return "PQ";
  }
  return "?";
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::thermal: return "thermal";
    case GeneratorKind::wind: return "wind";
    case GeneratorKind::solar: return "solar";
    case GeneratorKind::balancing: return "balancing";
  }
  return "?";
}

BusKind parse_bus_kind(std::string_view text) {
  if (text == "slack") return BusKind::slack;
  if (text == "PV") return BusKind::pv;
  if (text == "PQ") return BusKind::pq;
  throw Error("unknown bus kind '" + std::string(text) + "'");
}

GeneratorKind parse_generator_kind(std::string_view text) {
  if (text == "thermal") return GeneratorKind::thermal;
  if (text == "wind") return GeneratorKind::wind;
  if (text == "solar") return GeneratorKind::solar;
  if (text == "balancing") return GeneratorKind::balancing;
  throw Error("unknown generator kind '" + std::string(text) + "'");
}

namespace {

void require(bool ok, const char* invariant, const std::string& detail) {
  if (!ok) throw InvariantError(invariant, detail);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

bool is_connected(const CaseData& data) {
  const std::size_t n = data.buses.size();
  if (n == 0) return false;
  std::unordered_map<int, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(data.buses[i].id, i);
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& br : data.branches) {
    if (!br.in_service) continue;
    auto f = index.find(br.from_bus);
    auto t = index.find(br.to_bus);
    if (f == index.end() || t == index.end()) continue;
    adjacency[f->second].push_back(t->second);
    adjacency[t->second].push_back(f->second);
  }
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    auto u = frontier.front();
    frontier.pop();
    for (auto v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

NetworkCase::NetworkCase(CaseData data) : data_(std::move(data)) { validate(); }

void NetworkCase::check() const { NetworkCase copy(data_); }

std::size_t NetworkCase::in_service_branch_count() const {
  return static_cast<std::size_t>(
      std::count_if(data_.branches.begin(), data_.branches.end(), [](const Branch& b) { return b.in_service; }));
}

std::optional<std::size_t> NetworkCase::find_bus(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t NetworkCase::bus_index(int id) const {
  auto idx = find_bus(id);
  if (!idx) throw Error("unknown bus id " + std::to_string(id));
  return *idx;
}

void NetworkCase::validate() {
  index_.clear();

  require(finite(data_.base_mva) && data_.base_mva > 0, "base_mva > 0", std::to_string(data_.base_mva));
  require(!data_.buses.empty(), "at least one bus", "case has no buses");

  std::optional<std::size_t> slack;
  for (std::size_t i = 0; i < data_.buses.size(); ++i) {
    const auto& b = data_.buses[i];
    const std::string where = "bus " + std::to_string(b.id);
    require(b.id > 0, "bus id > 0", where);
    require(index_.emplace(b.id, i).second, "unique bus ids", "duplicate " + where);
    require(finite(b.base_kv) && b.base_kv > 0, "base_kv > 0", where);
    require(finite(b.v_min) && finite(b.v_max) && b.v_min < b.v_max, "v_min < v_max", where);
    require(finite(b.load_p) && finite(b.load_q) && finite(b.shunt_g) && finite(b.shunt_b), "finite bus data", where);
    if (b.kind == BusKind::slack) {
      require(!slack, "exactly one slack bus", "two slack buses (" + std::to_string(data_.buses[*slack].id) + ", " +
                                                   std::to_string(b.id) + ")");
      slack = i;
    }
  }
  require(slack.has_value(), "exactly one slack bus", "no slack bus");
  slack_bus_ = *slack;

  for (std::size_t k = 0; k < data_.branches.size(); ++k) {
    const auto& br = data_.branches[k];
    const std::string where = "branch " + std::to_string(k) + " (" + std::to_string(br.from_bus) + "-" +
                              std::to_string(br.to_bus) + ")";
    require(index_.count(br.from_bus) && index_.count(br.to_bus), "bus references resolve", where);
    require(br.from_bus != br.to_bus, "from_bus != to_bus", where);
    require(finite(br.r) && finite(br.x) && finite(br.b), "finite branch impedance", where);
    require(!br.in_service || br.x != 0.0, "x != 0 for in-service branches", where);
    require(finite(br.rate_mva) && br.rate_mva > 0, "rate_mva > 0", where);
    require(finite(br.tap) && br.tap > 0, "tap > 0", where);
    require(finite(br.shift_deg), "finite phase shift", where);
  }

  std::optional<std::size_t> balancing;
  double thermal_c2 = std::numeric_limits<double>::infinity();
  double thermal_c1 = std::numeric_limits<double>::infinity();
  double renewable_c2 = -std::numeric_limits<double>::infinity();
  double renewable_c1 = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < data_.generators.size(); ++g) {
    const auto& gen = data_.generators[g];
    const std::string where = "generator " + std::to_string(g) + " at bus " + std::to_string(gen.bus);
    require(index_.count(gen.bus) > 0, "bus references resolve", where);
    require(finite(gen.p_min) && finite(gen.p_max) && gen.p_min <= gen.p_max, "p_min <= p_max", where);
    require(finite(gen.q_min) && finite(gen.q_max) && gen.q_min < gen.q_max, "q_min < q_max", where);
    require(finite(gen.v_set) && gen.v_set > 0, "v_set > 0", where);
    require(finite(gen.p_set) && finite(gen.q_set), "finite generator setpoints", where);
    const auto& c = gen.cost;
    require(finite(c.c2) && finite(c.c1) && finite(c.c0) && finite(c.c_on_off), "finite cost coefficients", where);
    require(c.c2 >= 0, "c2 >= 0", where);
    if (gen.kind == GeneratorKind::balancing) {
      require(!balancing, "exactly one balancing generator", "second one is " + where);
      require(index_.at(gen.bus) == slack_bus_, "balancing generator sits on the slack bus", where);
      require(gen.in_service, "balancing generator in service", where);
      balancing = g;
    }
    if (is_renewable(gen.kind)) {
      renewable_c2 = std::max(renewable_c2, c.c2);
      renewable_c1 = std::max(renewable_c1, c.c1);
    } else {
      thermal_c2 = std::min(thermal_c2, c.c2);
      thermal_c1 = std::min(thermal_c1, c.c1);
    }
  }
  require(balancing.has_value(), "exactly one balancing generator", "none found");
  balancing_gen_ = *balancing;

  // Renewables must be cheaper than every thermal unit: strictly on the
  // linear term, and no higher on the quadratic term.
  if (renewable_c1 > -std::numeric_limits<double>::infinity()) {
    require(renewable_c1 < thermal_c1 && renewable_c2 <= thermal_c2, "renewable costs below thermal costs",
            "renewable (c2,c1) max (" + std::to_string(renewable_c2) + "," + std::to_string(renewable_c1) +
                ") vs thermal min (" + std::to_string(thermal_c2) + "," + std::to_string(thermal_c1) + ")");
  }

  require(is_connected(data_), "connected network", "in-service branches leave buses unreachable");
}

NetworkCase designate_renewables(const NetworkCase& base, const std::vector<RenewableDesignation>& units) {
  CaseData data = base.data();
  for (const auto& u : units) {
    if (u.generator >= data.generators.size()) {
      throw Error("renewable designation references generator " + std::to_string(u.generator) + " of " +
                  std::to_string(data.generators.size()));
    }
    if (!is_renewable(u.kind)) throw Error("renewable designation must be wind or solar");
    auto& gen = data.generators[u.generator];
    if (gen.kind == GeneratorKind::balancing) {
      throw Error("the balancing generator cannot be designated renewable");
    }
    gen.kind = u.kind;
    gen.cost.c2 = 0.0;
    gen.cost.c1 = 0.0;
    gen.cost.c0 = 0.0;
  }
  return NetworkCase(std::move(data));
}

}  // namespace gridscale::grid
