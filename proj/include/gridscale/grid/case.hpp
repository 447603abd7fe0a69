#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gridscale::grid {

enum class BusKind { slack, pv, pq };
enum class GeneratorKind { thermal, wind, solar, balancing };

std::string_view to_string(BusKind kind);
std::string_view to_string(GeneratorKind kind);
BusKind parse_bus_kind(std::string_view text);
GeneratorKind parse_generator_kind(std::string_view text);

inline bool is_renewable(GeneratorKind kind) {
  return kind == GeneratorKind::wind || kind == GeneratorKind::solar;
}

struct Bus {
  int id = 0;  ///< external bus number, unique and positive
  BusKind kind = BusKind::pq;
  double base_kv = 1.0;
  double v_min = 0.94;  ///< pu
  double v_max = 1.06;  ///< pu
  double load_p = 0.0;  ///< MW
  double load_q = 0.0;  ///< MVAr
  double shunt_g = 0.0; ///< MW consumed at 1 pu
  double shunt_b = 0.0; ///< MVAr injected at 1 pu

  bool operator==(const Bus&) const = default;
};

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;  ///< pu on base_mva
  double x = 0.0;
  double b = 0.0;  ///< total line charging, pu
  double rate_mva = 0.0;
  double tap = 1.0;        ///< off-nominal turns ratio at the from side
  double shift_deg = 0.0;  ///< phase shift at the from side
  bool in_service = true;

  bool operator==(const Branch&) const = default;
};

struct CostCurve {
  double c2 = 0.0;  ///< $/MW^2
  double c1 = 0.0;  ///< $/MW
  double c0 = 0.0;  ///< $
  double c_on_off = 0.0;

  bool operator==(const CostCurve&) const = default;
};

struct Generator {
  int bus = 0;
  GeneratorKind kind = GeneratorKind::thermal;
  double p_min = 0.0;  ///< MW
  double p_max = 0.0;
  double q_min = 0.0;  ///< MVAr
  double q_max = 0.0;
  double v_set = 1.0;  ///< pu
  double p_set = 0.0;  ///< base-case dispatch, MW
  double q_set = 0.0;  ///< MVAr, used only when the bus is not voltage controlled
  bool in_service = true;
  CostCurve cost;

  bool operator==(const Generator&) const = default;
};

/// Plain, unchecked case contents. Wrap in NetworkCase to validate.
struct CaseData {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  bool operator==(const CaseData&) const = default;
};

/// Validated, immutable network. Construction enforces every invariant; the
/// first violation throws InvariantError naming it.
class NetworkCase {
 public:
  explicit NetworkCase(CaseData data);

  const CaseData& data() const { return data_; }
  const std::string& name() const { return data_.name; }
  double base_mva() const { return data_.base_mva; }
  const std::vector<Bus>& buses() const { return data_.buses; }
  const std::vector<Branch>& branches() const { return data_.branches; }
  const std::vector<Generator>& generators() const { return data_.generators; }

  std::size_t bus_count() const { return data_.buses.size(); }
  std::size_t in_service_branch_count() const;

  /// Position of bus `id` in buses(); throws if unknown.
  std::size_t bus_index(int id) const;
  std::optional<std::size_t> find_bus(int id) const;

  std::size_t slack_bus() const { return slack_bus_; }
  std::size_t balancing_generator() const { return balancing_gen_; }

  /// Re-runs every invariant check; throws on the first violation.
  void check() const;

  bool operator==(const NetworkCase& other) const { return data_ == other.data_; }

 private:
  void validate();

  CaseData data_;
  std::unordered_map<int, std::size_t> index_;
  std::size_t slack_bus_ = 0;
  std::size_t balancing_gen_ = 0;
};

/// True when every bus is reachable from the first one over in-service
/// branches. Breadth-first search.
bool is_connected(const CaseData& data);

struct RenewableDesignation {
  std::size_t generator = 0;  ///< index into generators()
  GeneratorKind kind = GeneratorKind::wind;

  bool operator==(const RenewableDesignation&) const = default;
};

/// Marks generators as wind or solar and zeroes their operating cost
/// coefficients (startup cost kept). The balancing generator cannot be
/// designated.
NetworkCase designate_renewables(const NetworkCase& base, const std::vector<RenewableDesignation>& units);

}  // namespace gridscale::grid
