#pragma once

#include <map>
#include <string>
#include <vector>

#include "wwsim/waterwave.hpp"

namespace wwsim {

// First line of every CSV written by the tools.
inline constexpr const char* kCsvSchema = "# wwsim-csv v1";

// Numbers are written with 17 significant digits; NaN is written as "nan".
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

// Lowercase hex SHA-256.
std::string content_hash(const std::string& data);

// Run manifest: command, canonical config text, its hash and free-form string fields.
void write_manifest(const std::string& path, const std::string& command, const std::string& config,
                    const std::map<std::string, std::string>& extra = {});

// Flat JSON object of numbers and booleans.
struct Summary {
    std::map<std::string, double> numbers;
    std::map<std::string, bool> flags;
    std::map<std::string, std::string> strings;
};
void write_summary(const std::string& path, const Summary& s);

// Plain-text header (grid, t, eps, q, n) terminated by a line "data", then offset and
// u as interleaved re/im little-endian float64.
void write_checkpoint(const std::string& path, const WaterState& s, double eps);
WaterState read_checkpoint(const std::string& path, double* eps = nullptr);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};
struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
};
// Static SVG line plot. Non-finite points and, on a log axis, non-positive points are skipped.
void write_svg_plot(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series);

void ensure_directory(const std::string& path);

}  // namespace wwsim
