#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

namespace wfdens::io {

inline constexpr int kSchemaVersion = 1;

//! Shortest decimal representation that round-trips.
std::string format_double(double v);

//! First line of every CSV written by this project.
void write_schema_line(std::ostream& os, std::string_view schema);

//! Skips the schema line if present and returns the next (header) line.
std::string read_header(std::istream& is);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

//! FNV-1a 64-bit, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

} // namespace wfdens::io
