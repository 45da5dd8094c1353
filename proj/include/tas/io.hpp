#pragma once

// Plain CSV writers/readers. Numbers are written in the shortest form that
// parses back to the same double, so files are byte-stable and round-trip.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tas::io {

[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(std::string_view s);

/// n rows of n comma-separated values; row i holds pixels i*n .. i*n+n-1.
void write_grid_csv(std::ostream& os, std::span<const double> field, std::size_t n);
[[nodiscard]] std::vector<double> read_grid_csv(std::istream& is, std::size_t& n);

/// Header line plus one row per record, all columns numeric.
void write_table_csv(std::ostream& os, std::span<const std::string> header,
                     const std::vector<std::vector<double>>& rows);

[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace tas::io
