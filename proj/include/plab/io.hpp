#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace plab {

// Minimal CSV: comma-separated fields, no quoting (fields here are numbers
// and identifiers), '#'-prefixed lines skipped.
std::vector<std::vector<std::string>> read_csv(const std::string& path);
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a, for config and artifact fingerprints in run records.
uint64_t fnv1a(const std::string& data);
std::string fnv1a_hex(const std::string& data);

// Single-polyline log-log or linear plot, written as a self-contained SVG.
struct SeriesPlot {
  std::string title, x_label, y_label;
  struct Series {
    std::string name;
    std::vector<double> x, y;
  };
  std::vector<Series> series;
  void write_svg(const std::string& path) const;
};

}  // namespace plab
