#pragma once

// Ground-truth temperature/concentration fields, the exact measurements they
// produce, and the multiplicative uniform noise model.

#include "tas/geometry.hpp"
#include "tas/spectroscopy.hpp"

#include <cstdint>
#include <vector>

namespace tas {

/// One vector per wavelength: a^k (length M) or b^k (length N).
using PerLine = std::vector<std::vector<double>>;

struct Phantom {
    Field x_true; ///< temperature, K
    Field y_true; ///< mole fraction
};

struct GaussianPeak {
    double cu = 0.0;    ///< centre, fraction of the side length from the ROI centre
    double cv = 0.0;
    double sigma = 0.1; ///< standard deviation, fraction of the side length
    double amp_x = 0.0; ///< temperature amplitude, K
    double amp_y = 0.0; ///< mole-fraction amplitude
};

/// Smooth two-peak phantom. Defaults stay inside [800, 2400] K and [0.005, 0.2].
struct TwoGaussianParams {
    double base_x = 1000.0;
    double base_y = 0.02;
    GaussianPeak first{-0.18, -0.15, 0.13, 1200.0, 0.12};
    GaussianPeak second{0.2, 0.17, 0.11, 900.0, 0.08};
};

/// Flat-top disk with a Gaussian rim, after a laminar flat-flame burner.
/// Defaults stay inside [400, 2000] K and [0.005, 0.2].
struct FlameParams {
    double radius = 0.3;  ///< plateau radius, fraction of the side length
    double falloff = 0.06; ///< Gaussian rim width; 0 gives a hard edge
    double ambient_x = 500.0;
    double plateau_x = 1900.0;
    double ambient_y = 0.01;
    double plateau_y = 0.15;
};

/// Normalised pixel-centre coordinates in [-0.5, 0.5]: (u along columns, v along rows).
[[nodiscard]] std::pair<double, double> pixel_center(const Grid& grid, std::size_t pixel);

[[nodiscard]] Phantom phantom_two_gaussians(const Grid& grid, const TwoGaussianParams& params = {});
[[nodiscard]] Phantom phantom_flame(const Grid& grid, const FlameParams& params = {});

/// a^k = beta_k(x_true, y_true) for every line.
[[nodiscard]] PerLine true_abs_coeffs(const LineTable& table, const Phantom& phantom);

/// b^k = L a^k for every line.
[[nodiscard]] PerLine forward_project(const SystemMatrix& L, const LineTable& table,
                                      const Phantom& phantom);

struct NoiseSpec {
    double level = 0.02; ///< u >= 0
    std::uint64_t seed = 1;
};

/// b_mes = b * (1 + r*u) with r ~ U(-1, 1) drawn in (k, i) row-major order.
[[nodiscard]] PerLine add_uniform_noise(const PerLine& b, const NoiseSpec& spec);

} // namespace tas
