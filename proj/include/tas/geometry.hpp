#pragma once

// Square pixel grid, parallel-beam arrangements and the sparse matrix of
// beam/pixel intersection lengths.
//
// The ROI is centred on the origin and spans [-side/2, side/2]^2. Pixel
// (row, col) covers the cell whose lower-left corner is
// (-side/2 + col*h, -side/2 + row*h), and has flat index row*n + col; row 0 is
// at the bottom of the ROI.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace tas {

struct Grid {
    std::size_t n = 1;        ///< pixels per side, M = n*n
    double side_length = 1.0; ///< physical ROI edge length

    Grid() = default;
    Grid(std::size_t n_, double side);
    /// Unit pixels: side_length = n.
    explicit Grid(std::size_t n_);

    [[nodiscard]] std::size_t pixel_count() const noexcept { return n * n; }
    [[nodiscard]] double pixel_size() const noexcept { return side_length / static_cast<double>(n); }
    [[nodiscard]] double half_side() const noexcept { return 0.5 * side_length; }
};

struct Beam {
    double angle = 0.0;  ///< direction of travel in degrees, [0, 180)
    double offset = 0.0; ///< signed distance of the line from the ROI centre along its left normal
};

struct RowEntry {
    std::size_t pixel;
    double length;
};

/// Compressed-row matrix of intersection lengths, N beams by M pixels.
class SystemMatrix {
public:
    SystemMatrix() = default;
    SystemMatrix(std::size_t cols, const std::vector<std::vector<RowEntry>>& rows);

    [[nodiscard]] std::size_t rows() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }

    [[nodiscard]] std::span<const std::size_t> row_indices(std::size_t i) const;
    [[nodiscard]] std::span<const double> row_values(std::size_t i) const;
    [[nodiscard]] double row_dot(std::size_t i, std::span<const double> v) const;
    [[nodiscard]] double row_norm2(std::size_t i) const;
    [[nodiscard]] double row_sum(std::size_t i) const;

    /// L v
    [[nodiscard]] std::vector<double> multiply(std::span<const double> v) const;

    /// One "row col length" line per stored entry.
    void write_triplets(std::ostream& os) const;

private:
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// per_direction parallel beams for each angle; offsets are the centres of
/// per_direction equal bins covering the ROI's projection on the beam normal.
[[nodiscard]] std::vector<Beam> make_parallel_beams(const Grid& grid, std::span<const double> directions,
                                                    std::size_t per_direction);

/// The four-direction arrangement (0, 45, 90, 135 degrees).
[[nodiscard]] std::vector<Beam> make_standard_beams(const Grid& grid, std::size_t per_direction);

/// Chord length of the beam inside the ROI (0 if it misses).
[[nodiscard]] double chord_length(const Grid& grid, const Beam& beam);

/// Exact intersection lengths of the beam with every pixel it crosses, in
/// order of travel.
[[nodiscard]] std::vector<RowEntry> trace_beam(const Grid& grid, const Beam& beam);

[[nodiscard]] SystemMatrix build_system_matrix(const Grid& grid, std::span<const Beam> beams);

} // namespace tas
