/**
 * @file io.hpp
 * @brief CSV emission with a fixed numeric format (12 significant digits,
 * '.' decimal) plus the run-manifest record written next to every output.
 */
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mimobc {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_value(double v);

/// UTF-8, comma separated, header row; throws on unwritable path.
void emit_csv(const CsvTable& table, const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
  std::string library_version;
  std::string timestamp_utc;
};

/// Serialized as JSON at `<path>.manifest.json`.
void write_manifest(const RunManifest& manifest, const std::string& csv_path);

std::string library_version();

}  // namespace mimobc
