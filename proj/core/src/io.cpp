#include "mimobc/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mimobc {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void emit_csv(const CsvTable& table, const std::string& path) {
  if (table.header.empty()) {
    throw std::invalid_argument("emit_csv: empty table");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

void write_manifest(const RunManifest& manifest, const std::string& csv_path) {
  const std::string path = csv_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r.push_back('\\');
      r.push_back(c);
    }
    return r;
  };
  out << "{\n";
  out << "  \"command\": \"" << escape(manifest.command) << "\",\n";
  out << "  \"parameters\": {";
  for (std::size_t i = 0; i < manifest.parameters.size(); ++i) {
    if (i) out << ',';
    out << "\n    \"" << escape(manifest.parameters[i].first) << "\": \""
        << escape(manifest.parameters[i].second) << '"';
  }
  out << "\n  },\n";
  out << "  \"seed\": " << manifest.seed << ",\n";
  out << "  \"library_version\": \"" << escape(manifest.library_version)
      << "\",\n";
  out << "  \"timestamp_utc\": \"" << escape(manifest.timestamp_utc) << "\"\n";
  out << "}\n";
}

std::string library_version() { return "0.1.0"; }

}  // namespace mimobc
