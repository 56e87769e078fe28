#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoflow {

// 17 significant digits: enough for exact double round-trips.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC 4180 field quoting: quotes, commas, and line breaks force a quoted
// field with embedded quotes doubled. Everything else passes through.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

inline std::string csv_document(
    const std::vector<std::string>& header,
    const std::vector<std::vector<std::string>>& rows) {
  std::string out = csv_line(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("csv_document: row width " +
                               std::to_string(row.size()) +
                               " does not match header width " +
                               std::to_string(header.size()));
    out += csv_line(row);
  }
  return out;
}

// Writes via a sibling temp file and rename, so readers never observe a
// partially written report.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write_text_atomic: cannot write " +
                               tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace geoflow
