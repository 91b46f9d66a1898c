#pragma once

// Output plumbing for the command-line front-end: locale-independent number
// formatting, atomic file writes, checksums and run manifests.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dwlab/scaling.hpp"

namespace dwlab::io {

/// 17 significant digits, '.' decimal point, no locale.
std::string format_double(double v);

/// Shortest representation that round-trips.
std::string format_double_short(double v);

/// Strict locale-independent parse; throws InvalidInput on trailing garbage.
double parse_double(std::string_view s);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view content);

struct OutputFile {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string version;
  double wall_seconds = 0.0;
  std::size_t warnings = 0;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<OutputFile> outputs;

  nlohmann::json to_json() const;
};

/// Manifest path written next to an output: "<out>.manifest.json".
std::filesystem::path manifest_path(const std::filesystem::path& out);

// Scan tables -----------------------------------------------------------------

extern const std::vector<std::string> kScanColumns;

std::string scan_to_csv(const scaling::ScanResult& result);
nlohmann::json scan_to_json(const scaling::ScanResult& result);

/// Minimal RFC-4180 reader (no quoted fields): header + rows of cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

}  // namespace dwlab::io
