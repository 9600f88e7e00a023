#include "wfdens/io.hpp"

#include "wfdens/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wfdens::io {

std::string
format_double(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return {buffer, result.ptr};
}

void
write_schema_line(std::ostream& os, std::string_view schema)
{
  os << "# schema: " << schema << " v" << kSchemaVersion << '\n';
}

std::string
read_header(std::istream& is)
{
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.front() != '#')
      return line;
  }
  throw IoError("CSV has no header line");
}

void
write_text(const std::filesystem::path& path, std::string_view text)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out)
    throw IoError("failed writing " + path.string());
}

std::string
read_text(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void
write_json(const std::filesystem::path& path, const nlohmann::json& value)
{
  write_text(path, value.dump(2) + "\n");
}

nlohmann::json
read_json(const std::filesystem::path& path)
{
  const auto text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string
fnv1a_hex(std::string_view bytes)
{
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

} // namespace wfdens::io
