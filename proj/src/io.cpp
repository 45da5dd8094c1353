#include "tas/io.hpp"

#include "tas/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tas::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.emplace_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

void write_grid_csv(std::ostream& os, std::span<const double> field, std::size_t n) {
    if (field.size() != n * n) {
        throw ShapeError("write_grid_csv: field is not n*n");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                os << ',';
            }
            os << format_double(field[i * n + j]);
        }
        os << '\n';
    }
}

std::vector<double> read_grid_csv(std::istream& is, std::size_t& n) {
    std::vector<double> values;
    std::string line;
    std::size_t rows = 0;
    n = 0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (rows == 0) {
            n = cells.size();
        } else if (cells.size() != n) {
            throw ShapeError("read_grid_csv: ragged rows");
        }
        for (const auto& c : cells) {
            values.push_back(parse_double(c));
        }
        ++rows;
    }
    if (rows != n) {
        throw ShapeError("read_grid_csv: grid is not square");
    }
    return values;
}

void write_table_csv(std::ostream& os, std::span<const std::string> header,
                     const std::vector<std::vector<double>>& rows) {
    for (std::size_t c = 0; c < header.size(); ++c) {
        os << (c ? "," : "") << header[c];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << (c ? "," : "") << format_double(row[c]);
        }
        os << '\n';
    }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << contents;
}

} // namespace tas::io
