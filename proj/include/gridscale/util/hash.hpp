#pragma once

#include <string>
#include <string_view>

namespace gridscale::util {

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents; throws gridscale::Error if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace gridscale::util
