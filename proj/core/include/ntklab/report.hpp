#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ntklab/linalg.hpp"

namespace ntk {

/// Shortest round-trip decimal, '.' separator, independent of locale.
std::string format_number(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// Comment lines (prefixed "# "), the header, then one line per row. Cells
/// containing commas or quotes are quoted.
std::string to_csv(const Table& t, const std::vector<std::string>& comments = {});

struct Series {
  std::string name;
  Vec x;
  Vec y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Minimal SVG line chart with axes, labels and one polyline per series.
std::string svg_line_chart(const ChartSpec& spec, const std::vector<Series>& series);

/// 16 hex digits of FNV-1a over the compact JSON dump.
std::string config_hash(const nlohmann::json& config);

struct Report {
  std::string name;
  Table table;
  std::vector<std::pair<ChartSpec, std::vector<Series>>> charts;
};

/// Writes <dir>/<name>.csv and <dir>/<name>_<k>.svg. Every file carries the
/// config hash and seed. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir, const Report& report,
                                               const nlohmann::json& config, std::uint64_t seed);

}  // namespace ntk
