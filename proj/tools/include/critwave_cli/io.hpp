#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace critwave::cli {

using Json = nlohmann::ordered_json;

// Writes to a sibling temporary file, then renames it over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

// Scientific notation with 17 significant digits.
std::string format_real(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // one vector per header entry, equal lengths

  void add(std::string name, std::vector<double> column);
  std::string render() const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const Json& doc);
std::string render_json(const Json& doc);

// path with its extension replaced by .json (or .json appended when it has none).
std::filesystem::path sidecar_json(const std::filesystem::path& path);

// hardware_concurrency capped by CRITWAVE_THREADS when set to a positive integer.
unsigned worker_count();

}  // namespace critwave::cli
