#include "tas/phantoms.hpp"

#include "tas/errors.hpp"
#include "tas/random.hpp"

#include <cmath>

namespace tas {

std::pair<double, double> pixel_center(const Grid& grid, std::size_t pixel) {
    const double n = static_cast<double>(grid.n);
    const double col = static_cast<double>(pixel % grid.n);
    const double row = static_cast<double>(pixel / grid.n);
    return {(col + 0.5) / n - 0.5, (row + 0.5) / n - 0.5};
}

namespace {

double gaussian(const GaussianPeak& p, double u, double v) {
    const double du = u - p.cu;
    const double dv = v - p.cv;
    return std::exp(-(du * du + dv * dv) / (2.0 * p.sigma * p.sigma));
}

} // namespace

Phantom phantom_two_gaussians(const Grid& grid, const TwoGaussianParams& params) {
    const std::size_t m = grid.pixel_count();
    Phantom ph{Field(m), Field(m)};
    for (std::size_t j = 0; j < m; ++j) {
        const auto [u, v] = pixel_center(grid, j);
        const double g1 = gaussian(params.first, u, v);
        const double g2 = gaussian(params.second, u, v);
        ph.x_true[j] = params.base_x + params.first.amp_x * g1 + params.second.amp_x * g2;
        ph.y_true[j] = params.base_y + params.first.amp_y * g1 + params.second.amp_y * g2;
    }
    return ph;
}

Phantom phantom_flame(const Grid& grid, const FlameParams& params) {
    const std::size_t m = grid.pixel_count();
    Phantom ph{Field(m), Field(m)};
    for (std::size_t j = 0; j < m; ++j) {
        const auto [u, v] = pixel_center(grid, j);
        const double r = std::hypot(u, v);
        double w = 1.0;
        if (r > params.radius) {
            w = params.falloff > 0.0
                    ? std::exp(-(r - params.radius) * (r - params.radius) /
                               (2.0 * params.falloff * params.falloff))
                    : 0.0;
        }
        ph.x_true[j] = params.ambient_x + (params.plateau_x - params.ambient_x) * w;
        ph.y_true[j] = params.ambient_y + (params.plateau_y - params.ambient_y) * w;
    }
    return ph;
}

PerLine true_abs_coeffs(const LineTable& table, const Phantom& phantom) {
    PerLine a;
    a.reserve(table.size());
    for (std::size_t k = 0; k < table.size(); ++k) {
        a.push_back(beta(table, k, phantom.x_true, phantom.y_true));
    }
    return a;
}

PerLine forward_project(const SystemMatrix& L, const LineTable& table, const Phantom& phantom) {
    if (phantom.x_true.size() != L.cols()) {
        throw ShapeError("forward_project: phantom has " + std::to_string(phantom.x_true.size()) +
                         " pixels, system matrix has " + std::to_string(L.cols()) + " columns");
    }
    PerLine b;
    b.reserve(table.size());
    for (const auto& a : true_abs_coeffs(table, phantom)) {
        b.push_back(L.multiply(a));
    }
    return b;
}

PerLine add_uniform_noise(const PerLine& b, const NoiseSpec& spec) {
    if (!(spec.level >= 0.0)) {
        throw ConfigError("noise level must be nonnegative");
    }
    if (spec.level == 0.0) {
        return b;
    }
    UniformStream rng(spec.seed);
    PerLine out = b;
    for (auto& row : out) {
        for (double& v : row) {
            v *= 1.0 + rng.symmetric() * spec.level;
        }
    }
    return out;
}

} // namespace tas
