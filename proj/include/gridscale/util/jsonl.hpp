#pragma once

#include <filesystem>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace gridscale::util {

using Json = nlohmann::json;

/// Reads one JSON value per non-empty line.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

/// Writes one compact JSON value per line, '\n' terminated.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Throws Error naming `context` if `j` has a key outside `allowed`.
void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& context);

/// Assigns j[key] to `out` when present.
template <class T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace gridscale::util
