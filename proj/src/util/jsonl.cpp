#include "gridscale/util/jsonl.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gridscale/error.hpp"

namespace gridscale::util {

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<Json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no, e.byte);
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& row : rows) out << row.dump() << '\n';
}

Json read_json(const std::filesystem::path& path) {
  auto text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0, e.byte);
  }
}

void write_json(const std::filesystem::path& path, const Json& value) {
  write_text(path, value.dump(2) + "\n");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf, end);
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& context) {
  if (!j.is_object()) throw Error(context + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw Error(context + ": unknown key '" + key + "'");
  }
}

}  // namespace gridscale::util
