#include "gridscale/grid/case_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include <json.hpp>

#include "gridscale/error.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::grid {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kSchema = "gridcase/1";

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// ---------------------------------------------------------------- native JSON

NetworkCase parse_native(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character.
    auto [line, col] = line_column(source, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
  try {
    if (doc.value("schema", std::string()) != kSchema) {
      throw ParseError(std::string("expected \"schema\": \"") + kSchema + "\"", 1, 1);
    }
    CaseData data;
    data.name = doc.at("name").get<std::string>();
    data.base_mva = doc.at("base_mva").get<double>();
    for (const auto& b : doc.at("buses")) {
      Bus bus;
      bus.id = b.at("id").get<int>();
      bus.kind = parse_bus_kind(b.at("kind").get<std::string>());
      bus.base_kv = b.at("base_kv").get<double>();
      bus.v_min = b.at("v_min").get<double>();
      bus.v_max = b.at("v_max").get<double>();
      bus.load_p = b.at("load_p").get<double>();
      bus.load_q = b.at("load_q").get<double>();
      bus.shunt_g = b.at("shunt_g").get<double>();
      bus.shunt_b = b.at("shunt_b").get<double>();
      data.buses.push_back(bus);
    }
    for (const auto& b : doc.at("branches")) {
      Branch br;
      br.from_bus = b.at("from_bus").get<int>();
      br.to_bus = b.at("to_bus").get<int>();
      br.r = b.at("r").get<double>();
      br.x = b.at("x").get<double>();
      br.b = b.at("b").get<double>();
      br.rate_mva = b.at("rate_mva").get<double>();
      br.tap = b.at("tap").get<double>();
      br.shift_deg = b.at("shift_deg").get<double>();
      br.in_service = b.at("in_service").get<bool>();
      data.branches.push_back(br);
    }
    for (const auto& g : doc.at("generators")) {
      Generator gen;
      gen.bus = g.at("bus").get<int>();
      gen.kind = parse_generator_kind(g.at("kind").get<std::string>());
      gen.p_min = g.at("p_min").get<double>();
      gen.p_max = g.at("p_max").get<double>();
      gen.q_min = g.at("q_min").get<double>();
      gen.q_max = g.at("q_max").get<double>();
      gen.v_set = g.at("v_set").get<double>();
      gen.p_set = g.at("p_set").get<double>();
      gen.q_set = g.at("q_set").get<double>();
      gen.in_service = g.at("in_service").get<bool>();
      const auto& c = g.at("cost");
      gen.cost.c2 = c.at("c2").get<double>();
      gen.cost.c1 = c.at("c1").get<double>();
      gen.cost.c0 = c.at("c0").get<double>();
      gen.cost.c_on_off = c.at("c_on_off").get<double>();
      data.generators.push_back(gen);
    }
    return NetworkCase(std::move(data));
  } catch (const json::exception& e) {
    throw ParseError(std::string("case schema: ") + e.what(), 0, 0);
  }
}

// ------------------------------------------------------------------ MATPOWER

struct Cell {
  double value;
  std::size_t line;
  std::size_t column;
};
using Row = std::vector<Cell>;
using Matrix = std::vector<Row>;

class MatpowerReader {
 public:
  explicit MatpowerReader(std::string_view text) : text_(text) {}

  void run() {
    for (;;) {
      skip_space(true);
      if (at_end()) break;
      if (peek_word("function")) {
        read_function_header();
      } else if (peek_word("mpc")) {
        read_assignment();
      } else {
        fail("expected 'function' or an 'mpc.<field> = ...' assignment");
      }
    }
  }

  std::string name;
  std::optional<double> base_mva;
  std::map<std::string, Matrix> tables;

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char cur() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (cur() == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("MATPOWER: " + what, line_, col_); }

  void skip_comment() {
    while (!at_end() && cur() != '\n') advance();
  }

  // Skips blanks and comments; newlines too when `newlines` is set.
  void skip_space(bool newlines) {
    while (!at_end()) {
      char c = cur();
      if (c == '%') {
        skip_comment();
      } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        advance();
      } else if (c == '.' && text_.substr(pos_, 3) == "...") {
        skip_comment();
        if (!at_end()) advance();
      } else {
        break;
      }
    }
  }

  bool peek_word(std::string_view word) const {
    if (text_.substr(pos_, word.size()) != word) return false;
    std::size_t end = pos_ + word.size();
    return end >= text_.size() || !(std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_');
  }

  std::string read_identifier() {
    std::string id;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_')) {
      id.push_back(cur());
      advance();
    }
    if (id.empty()) fail("expected an identifier");
    return id;
  }

  void expect(char c) {
    skip_space(false);
    if (cur() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  void read_function_header() {
    read_identifier();  // function
    skip_space(false);
    read_identifier();  // mpc
    expect('=');
    skip_space(false);
    name = read_identifier();
  }

  void read_assignment() {
    read_identifier();  // mpc
    expect('.');
    std::string field = read_identifier();
    expect('=');
    skip_space(false);
    if (cur() == '[') {
      tables[field] = read_matrix();
    } else if (cur() == '{') {
      skip_balanced('{', '}');
    } else if (cur() == '\'') {
      advance();
      while (!at_end() && cur() != '\'') advance();
      if (at_end()) fail("unterminated string");
      advance();
    } else {
      Cell c = read_number();
      if (field == "baseMVA") base_mva = c.value;
    }
    skip_space(false);
    if (cur() == ';') advance();
  }

  void skip_balanced(char open, char close) {
    int depth = 0;
    do {
      if (at_end()) fail(std::string("unbalanced '") + open + "'");
      if (cur() == '%') {
        skip_comment();
        continue;
      }
      if (cur() == open) ++depth;
      if (cur() == close) --depth;
      advance();
    } while (depth > 0);
  }

  Cell read_number() {
    Cell cell{0.0, line_, col_};
    std::size_t start = pos_;
    while (!at_end()) {
      char c = cur();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E') {
        advance();
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected a number");
    auto token = text_.substr(start, pos_ - start);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), cell.value);
    if (ec != std::errc{} || end != token.data() + token.size()) {
      throw ParseError("MATPOWER: malformed number '" + std::string(token) + "'", cell.line, cell.column);
    }
    return cell;
  }

  Matrix read_matrix() {
    advance();  // '['
    Matrix m;
    Row row;
    auto end_row = [&] {
      if (!row.empty()) m.push_back(std::move(row));
      row.clear();
    };
    for (;;) {
      skip_space(false);
      if (at_end()) fail("unterminated matrix");
      char c = cur();
      if (c == ']') {
        advance();
        end_row();
        return m;
      }
      if (c == ';' || c == '\n') {
        advance();
        end_row();
      } else if (c == ',') {
        advance();
      } else {
        row.push_back(read_number());
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

void require_columns(const Row& row, std::size_t n, const char* table) {
  if (row.size() < n) {
    throw ParseError(std::string("MATPOWER: ") + table + " row has " + std::to_string(row.size()) +
                         " columns, need at least " + std::to_string(n),
                     row.front().line, row.front().column);
  }
}

int as_int(const Cell& c, const char* what) {
  double r = std::round(c.value);
  if (r != c.value) {
    throw ParseError(std::string("MATPOWER: ") + what + " must be an integer", c.line, c.column);
  }
  return static_cast<int>(r);
}

NetworkCase parse_matpower(std::string_view source, std::string_view fallback_name) {
  MatpowerReader reader(source);
  reader.run();
  auto table = [&](const char* key) -> const Matrix& {
    auto it = reader.tables.find(key);
    if (it == reader.tables.end()) throw ParseError(std::string("MATPOWER: missing mpc.") + key, 0, 0);
    return it->second;
  };

  CaseData data;
  data.name = reader.name.empty() ? std::string(fallback_name) : reader.name;
  if (!reader.base_mva) throw ParseError("MATPOWER: missing mpc.baseMVA", 0, 0);
  data.base_mva = *reader.base_mva;

  for (const auto& row : table("bus")) {
    require_columns(row, 13, "bus");
    Bus bus;
    bus.id = as_int(row[0], "BUS_I");
    switch (as_int(row[1], "BUS_TYPE")) {
      case 1: bus.kind = BusKind::pq; break;
      case 2: bus.kind = BusKind::pv; break;
      case 3: bus.kind = BusKind::slack; break;
      default:
        throw ParseError("MATPOWER: unsupported bus type (isolated buses are not modeled)", row[1].line,
                         row[1].column);
    }
    bus.load_p = row[2].value;
    bus.load_q = row[3].value;
    bus.shunt_g = row[4].value;
    bus.shunt_b = row[5].value;
    bus.base_kv = row[9].value > 0 ? row[9].value : 1.0;
    bus.v_max = row[11].value;
    bus.v_min = row[12].value;
    data.buses.push_back(bus);
  }

  int slack_id = 0;
  for (const auto& b : data.buses) {
    if (b.kind == BusKind::slack) slack_id = b.id;
  }

  bool have_balancing = false;
  for (const auto& row : table("gen")) {
    require_columns(row, 10, "gen");
    Generator gen;
    gen.bus = as_int(row[0], "GEN_BUS");
    gen.p_set = row[1].value;
    gen.q_set = row[2].value;
    gen.q_max = row[3].value;
    gen.q_min = row[4].value;
    gen.v_set = row[5].value;
    gen.in_service = row[7].value > 0;
    gen.p_max = row[8].value;
    gen.p_min = row[9].value;
    if (!have_balancing && gen.bus == slack_id && gen.in_service) {
      gen.kind = GeneratorKind::balancing;
      have_balancing = true;
    }
    data.generators.push_back(gen);
  }

  for (const auto& row : table("branch")) {
    require_columns(row, 11, "branch");
    Branch br;
    br.from_bus = as_int(row[0], "F_BUS");
    br.to_bus = as_int(row[1], "T_BUS");
    br.r = row[2].value;
    br.x = row[3].value;
    br.b = row[4].value;
    br.rate_mva = row[5].value > 0 ? row[5].value : unlimited_rate_mva;
    br.tap = row[8].value != 0 ? row[8].value : 1.0;
    br.shift_deg = row[9].value;
    br.in_service = row[10].value > 0;
    data.branches.push_back(br);
  }

  auto gencost = reader.tables.find("gencost");
  if (gencost != reader.tables.end()) {
    const auto& rows = gencost->second;
    if (rows.size() < data.generators.size()) {
      throw ParseError("MATPOWER: gencost has fewer rows than gen", rows.empty() ? 0 : rows.back().front().line, 1);
    }
    for (std::size_t g = 0; g < data.generators.size(); ++g) {
      const auto& row = rows[g];
      require_columns(row, 4, "gencost");
      if (as_int(row[0], "MODEL") != 2) {
        throw ParseError("MATPOWER: only polynomial (model 2) costs are supported", row[0].line, row[0].column);
      }
      int n = as_int(row[3], "NCOST");
      if (n < 1 || n > 3) {
        throw ParseError("MATPOWER: polynomial cost must have 1 to 3 coefficients", row[3].line, row[3].column);
      }
      require_columns(row, 4 + static_cast<std::size_t>(n), "gencost");
      double coeff[3] = {0, 0, 0};  // c0, c1, c2
      for (int k = 0; k < n; ++k) coeff[n - 1 - k] = row[4 + k].value;
      auto& cost = data.generators[g].cost;
      cost.c2 = coeff[2];
      cost.c1 = coeff[1];
      cost.c0 = coeff[0];
      cost.c_on_off = row[1].value;
    }
  }
  return NetworkCase(std::move(data));
}

}  // namespace

NetworkCase parse_case(std::string_view source, CaseFormat format, std::string_view fallback_name) {
  switch (format) {
    case CaseFormat::native_json: return parse_native(source);
    case CaseFormat::matpower: return parse_matpower(source, fallback_name);
  }
  throw Error("unknown case format");
}

std::string serialize_case(const NetworkCase& network) {
  const auto& d = network.data();
  ordered_json doc;
  doc["schema"] = kSchema;
  doc["name"] = d.name;
  doc["base_mva"] = d.base_mva;
  auto buses = ordered_json::array();
  for (const auto& b : d.buses) {
    buses.push_back({{"id", b.id},
                     {"kind", std::string(to_string(b.kind))},
                     {"base_kv", b.base_kv},
                     {"v_min", b.v_min},
                     {"v_max", b.v_max},
                     {"load_p", b.load_p},
                     {"load_q", b.load_q},
                     {"shunt_g", b.shunt_g},
                     {"shunt_b", b.shunt_b}});
  }
  doc["buses"] = std::move(buses);
  auto branches = ordered_json::array();
  for (const auto& br : d.branches) {
    branches.push_back({{"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"r", br.r},
                        {"x", br.x},
                        {"b", br.b},
                        {"rate_mva", br.rate_mva},
                        {"tap", br.tap},
                        {"shift_deg", br.shift_deg},
                        {"in_service", br.in_service}});
  }
  doc["branches"] = std::move(branches);
  auto gens = ordered_json::array();
  for (const auto& g : d.generators) {
    gens.push_back({{"bus", g.bus},
                    {"kind", std::string(to_string(g.kind))},
                    {"p_min", g.p_min},
                    {"p_max", g.p_max},
                    {"q_min", g.q_min},
                    {"q_max", g.q_max},
                    {"v_set", g.v_set},
                    {"p_set", g.p_set},
                    {"q_set", g.q_set},
                    {"in_service", g.in_service},
                    {"cost",
                     {{"c2", g.cost.c2}, {"c1", g.cost.c1}, {"c0", g.cost.c0}, {"c_on_off", g.cost.c_on_off}}}});
  }
  doc["generators"] = std::move(gens);
  return doc.dump(1) + "\n";
}

NetworkCase load_case(const std::filesystem::path& path) {
  auto text = util::read_text(path);
  if (path.extension() == ".m") return parse_case(text, CaseFormat::matpower, path.stem().string());
  return parse_case(text, CaseFormat::native_json);
}

}  // namespace gridscale::grid
