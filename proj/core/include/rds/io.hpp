#pragma once

#include <filesystem>
#include <string>

namespace rds {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rds
