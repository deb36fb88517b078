#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace socbench::util {

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);
bool icontains(std::string_view haystack, std::string_view needle);
std::vector<std::string> split(std::string_view text, std::string_view delimiters);

/// "2024-05-01T12:00:00Z" (seconds precision, UTC).
std::string format_iso8601(std::chrono::system_clock::time_point tp);
std::string now_iso8601();
/// Accepts YYYY-MM-DD[T ]hh:mm[:ss[.fff]] with optional Z or +hh:mm offset;
/// a missing zone means UTC. Date-only strings are midnight UTC.
std::optional<std::chrono::system_clock::time_point> parse_iso8601(std::string_view text);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Write to a sibling temp file and rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace socbench::util
