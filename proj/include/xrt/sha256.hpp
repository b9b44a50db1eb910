#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace xrt {

/// Lowercase hex SHA-256 of an in-memory buffer.
std::string sha256_hex(std::string_view data);

/// Lowercase hex SHA-256 of a file's contents, streamed.
std::string sha256_file(const std::filesystem::path& path);

bool is_sha256_hex(std::string_view text) noexcept;

}  // namespace xrt
