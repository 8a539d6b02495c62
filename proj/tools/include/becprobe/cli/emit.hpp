#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "becprobe/observables.hpp"

namespace becprobe::cli {

// General notation with 17 significant digits.
std::string format_double(double x);

// `t,value` (or the given header) followed by one line per point, LF endings.
std::string timeseries_csv(const std::vector<std::pair<double, double>>& series,
                           const std::string& header = "t,value");

// Several columns sharing one header line.
std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

// `re,im,q`, row-major over the imaginary axis.
std::string husimi_csv(const HusimiGrid& grid);

std::string sha256_hex(std::string_view data);

// Writes bytes verbatim; throws std::runtime_error with the OS message on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

void emit_timeseries(const std::vector<std::pair<double, double>>& series, const std::filesystem::path& path);
void emit_husimi(const HusimiGrid& grid, const std::filesystem::path& path);

}  // namespace becprobe::cli
