#include "tas/geometry.hpp"

#include "tas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace tas {

namespace {

constexpr double kSliverTol = 1e-12;
constexpr double kEdgeNudge = 1e-9;

struct Direction {
    double dx;
    double dy;
};

// Exact unit vectors on the multiples of 45 degrees so that axis-aligned
// beams have no spurious 1e-17 components.
Direction unit_direction(double angle_deg) {
    const double a = std::fmod(std::fmod(angle_deg, 360.0) + 360.0, 360.0);
    if (std::fmod(a, 45.0) == 0.0) {
        constexpr double r = std::numbers::sqrt2 / 2.0;
        static constexpr Direction kTable[8] = {{1, 0}, {r, r},   {0, 1},  {-r, r},
                                                {-1, 0}, {-r, -r}, {0, -1}, {r, -r}};
        return kTable[static_cast<int>(a / 45.0) % 8];
    }
    const double rad = a * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

// Parametric interval [t0, t1] of the line p(t) = base + t*d inside [lo, hi]^2.
bool clip_to_box(double px, double py, Direction d, double lo, double hi, double& t0, double& t1) {
    t0 = -std::numeric_limits<double>::infinity();
    t1 = std::numeric_limits<double>::infinity();
    const auto slab = [&](double p, double dv) {
        if (dv == 0.0) {
            return p >= lo && p <= hi;
        }
        double a = (lo - p) / dv;
        double b = (hi - p) / dv;
        if (a > b) {
            std::swap(a, b);
        }
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
        return true;
    };
    if (!slab(px, d.dx) || !slab(py, d.dy)) {
        return false;
    }
    return t1 > t0;
}

} // namespace

Grid::Grid(std::size_t n_, double side) : n(n_), side_length(side) {
    if (n == 0) {
        throw ConfigError("grid needs at least one pixel per side");
    }
    if (!(side_length > 0.0)) {
        throw ConfigError("grid side length must be positive");
    }
}

Grid::Grid(std::size_t n_) : Grid(n_, static_cast<double>(n_)) {}

SystemMatrix::SystemMatrix(std::size_t cols, const std::vector<std::vector<RowEntry>>& rows)
    : cols_(cols) {
    row_ptr_.reserve(rows.size() + 1);
    row_ptr_.push_back(0);
    for (const auto& row : rows) {
        for (const auto& entry : row) {
            if (entry.pixel >= cols_) {
                throw IndexError("system matrix column out of range");
            }
            col_idx_.push_back(entry.pixel);
            values_.push_back(entry.length);
        }
        row_ptr_.push_back(col_idx_.size());
    }
}

std::span<const std::size_t> SystemMatrix::row_indices(std::size_t i) const {
    return {col_idx_.data() + row_ptr_.at(i), row_ptr_.at(i + 1) - row_ptr_[i]};
}

std::span<const double> SystemMatrix::row_values(std::size_t i) const {
    return {values_.data() + row_ptr_.at(i), row_ptr_.at(i + 1) - row_ptr_[i]};
}

double SystemMatrix::row_dot(std::size_t i, std::span<const double> v) const {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        acc += values_[p] * v[col_idx_[p]];
    }
    return acc;
}

double SystemMatrix::row_norm2(std::size_t i) const {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        acc += values_[p] * values_[p];
    }
    return acc;
}

double SystemMatrix::row_sum(std::size_t i) const {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        acc += values_[p];
    }
    return acc;
}

std::vector<double> SystemMatrix::multiply(std::span<const double> v) const {
    if (v.size() != cols_) {
        throw ShapeError("system matrix product: expected " + std::to_string(cols_) +
                         " components, got " + std::to_string(v.size()));
    }
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = row_dot(i, v);
    }
    return out;
}

void SystemMatrix::write_triplets(std::ostream& os) const {
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            os << i << ' ' << col_idx_[p] << ' ' << values_[p] << '\n';
        }
    }
    os.precision(old);
}

std::vector<Beam> make_parallel_beams(const Grid& grid, std::span<const double> directions,
                                      std::size_t per_direction) {
    if (per_direction == 0) {
        throw ConfigError("at least one beam per direction is required");
    }
    std::vector<Beam> beams;
    beams.reserve(directions.size() * per_direction);
    for (const double angle : directions) {
        const Direction d = unit_direction(angle);
        const double half = grid.half_side() * (std::abs(d.dx) + std::abs(d.dy));
        const double bin = 2.0 * half / static_cast<double>(per_direction);
        for (std::size_t b = 0; b < per_direction; ++b) {
            beams.push_back({angle, -half + (static_cast<double>(b) + 0.5) * bin});
        }
    }
    return beams;
}

std::vector<Beam> make_standard_beams(const Grid& grid, std::size_t per_direction) {
    static constexpr double kDirections[] = {0.0, 45.0, 90.0, 135.0};
    return make_parallel_beams(grid, kDirections, per_direction);
}

namespace {

// Beam line after resolving the edge ambiguity: base point and direction.
struct ResolvedLine {
    double px;
    double py;
    Direction d;
};

ResolvedLine resolve(const Grid& grid, const Beam& beam) {
    const Direction d = unit_direction(beam.angle);
    double offset = beam.offset;
    const double h = grid.pixel_size();
    // A beam running exactly along a pixel edge is moved by a tiny amount
    // towards its left normal, so that it belongs to exactly one pixel row.
    if (d.dx == 0.0 || d.dy == 0.0) {
        const double k = (offset + grid.half_side()) / h;
        if (std::abs(k - std::round(k)) <= kSliverTol * std::max(1.0, std::abs(k))) {
            offset += kEdgeNudge * h;
        }
    }
    return {-d.dy * offset, d.dx * offset, d};
}

} // namespace

double chord_length(const Grid& grid, const Beam& beam) {
    const auto line = resolve(grid, beam);
    double t0 = 0.0;
    double t1 = 0.0;
    if (!clip_to_box(line.px, line.py, line.d, -grid.half_side(), grid.half_side(), t0, t1)) {
        return 0.0;
    }
    return t1 - t0;
}

std::vector<RowEntry> trace_beam(const Grid& grid, const Beam& beam) {
    const auto [px, py, d] = resolve(grid, beam);
    const double lo = -grid.half_side();
    const double hi = grid.half_side();
    const double h = grid.pixel_size();
    const auto n = static_cast<long>(grid.n);

    double t_in = 0.0;
    double t_out = 0.0;
    if (!clip_to_box(px, py, d, lo, hi, t_in, t_out)) {
        return {};
    }

    // Parameters of every grid-line crossing strictly inside (t_in, t_out).
    std::vector<double> ts;
    ts.reserve(2 * grid.n + 2);
    ts.push_back(t_in);
    const auto crossings = [&](double p, double dv) {
        if (dv == 0.0) {
            return;
        }
        for (long i = 0; i <= n; ++i) {
            const double t = (lo + static_cast<double>(i) * h - p) / dv;
            if (t > t_in && t < t_out) {
                ts.push_back(t);
            }
        }
    };
    crossings(px, d.dx);
    crossings(py, d.dy);
    ts.push_back(t_out);
    std::sort(ts.begin(), ts.end());

    std::vector<RowEntry> row;
    row.reserve(ts.size());
    const double drop = kSliverTol * h;
    for (std::size_t s = 0; s + 1 < ts.size(); ++s) {
        const double len = ts[s + 1] - ts[s];
        if (len < drop) {
            continue;
        }
        const double tm = 0.5 * (ts[s] + ts[s + 1]);
        const long col = std::clamp(static_cast<long>(std::floor((px + tm * d.dx - lo) / h)), 0L, n - 1);
        const long rw = std::clamp(static_cast<long>(std::floor((py + tm * d.dy - lo) / h)), 0L, n - 1);
        row.push_back({static_cast<std::size_t>(rw * n + col), len});
    }
    return row;
}

SystemMatrix build_system_matrix(const Grid& grid, std::span<const Beam> beams) {
    if (beams.empty()) {
        throw ConfigError("system matrix needs at least one beam");
    }
    std::vector<std::vector<RowEntry>> rows;
    rows.reserve(beams.size());
    for (const auto& beam : beams) {
        rows.push_back(trace_beam(grid, beam));
    }
    return SystemMatrix(grid.pixel_count(), rows);
}

} // namespace tas
