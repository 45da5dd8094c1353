#pragma once

// Pixel-by-pixel nonlinear fitting baseline: for every pixel j, a 2-variable
// trust-region least-squares fit of (x_j, y_j) to the W coefficients a^k_j.

#include "tas/phantoms.hpp"
#include "tas/solver_core.hpp"
#include "tas/spectroscopy.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tas {

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

using Vec2 = std::array<double, 2>;

struct PixelModel {
    double value = 0.0; ///< sum_k (a_k - btilde_k(x) y)^2
    Vec2 g{};           ///< exact gradient
    Sym2 h;             ///< Gauss-Newton Hessian 2 J^T J
};

/// Objective, gradient and model Hessian of one pixel fit. Throws DomainError
/// for x <= 0.
[[nodiscard]] PixelModel pixel_objective(const LineTable& table, std::span<const double> a_j, double x,
                                         double y);

/// Exact minimiser of 0.5 s^T H s + g^T s over ||s|| <= delta.
[[nodiscard]] Vec2 tr_subproblem(const Vec2& g, const Sym2& h, double delta);

struct TrustRegionConfig {
    double delta0 = 0.0;       ///< initial radius; 0 means the 2-norm of the box diagonal
    double delta_min = 5e-10;
    double f_tol = 5e-10;      ///< relative to the current objective value
    std::size_t max_iter = 400;
    double expand = 2.0;
    double contract = 0.25;
    Interval x_bounds{800.0, 2400.0};
    Interval y_bounds{0.0, 1.0};
    bool record_history = false;

    [[nodiscard]] double initial_radius() const noexcept {
        return delta0 > 0.0 ? delta0 : std::hypot(x_bounds.hi - x_bounds.lo, y_bounds.hi - y_bounds.lo);
    }
    void validate() const;
};

enum class FitStop { function_tol, radius, max_iter };

[[nodiscard]] std::string_view to_string(FitStop s) noexcept;

struct PixelFit {
    double x = 0.0;
    double y = 0.0;
    std::size_t iterations = 0; ///< trust-region iterations, accepted or not
    std::size_t accepted = 0;
    FitStop stop = FitStop::max_iter;
    std::vector<double> objective_history; ///< value at the start and after each accepted step
};

/// Trust-region loop on a generic two-parameter least-squares model.
/// Model::evaluate(x, y) must return a PixelModel for the point.
template <class Model>
PixelFit trust_region_fit(const Model& model, double x0, double y0, const TrustRegionConfig& cfg) {
    PixelFit fit;
    fit.x = cfg.x_bounds.clamp(x0);
    fit.y = cfg.y_bounds.clamp(y0);
    const double delta_cap = cfg.initial_radius();
    double delta = delta_cap;
    PixelModel cur = model.evaluate(fit.x, fit.y);
    if (cfg.record_history) {
        fit.objective_history.push_back(cur.value);
    }
    while (true) {
        if (fit.iterations == cfg.max_iter) {
            fit.stop = FitStop::max_iter;
            break;
        }
        if (delta < cfg.delta_min) {
            fit.stop = FitStop::radius;
            break;
        }
        const Vec2 s = tr_subproblem(cur.g, cur.h, delta);
        const double predicted = -(cur.g[0] * s[0] + cur.g[1] * s[1] +
                                   0.5 * (cur.h.xx * s[0] * s[0] + 2.0 * cur.h.xy * s[0] * s[1] +
                                          cur.h.yy * s[1] * s[1]));
        const double tol = cfg.f_tol * cur.value;
        if (predicted <= tol) {
            fit.stop = FitStop::function_tol;
            break;
        }
        ++fit.iterations;
        const double xt = cfg.x_bounds.clamp(fit.x + s[0]);
        const double yt = cfg.y_bounds.clamp(fit.y + s[1]);
        PixelModel trial = model.evaluate(xt, yt);
        if (trial.value < cur.value) {
            const double change = cur.value - trial.value;
            fit.x = xt;
            fit.y = yt;
            cur = trial;
            ++fit.accepted;
            if (cfg.record_history) {
                fit.objective_history.push_back(cur.value);
            }
            if (change < tol) {
                fit.stop = FitStop::function_tol;
                break;
            }
            delta = std::min(delta * cfg.expand, delta_cap);
        } else {
            delta *= cfg.contract;
        }
    }
    return fit;
}

[[nodiscard]] PixelFit nf_fit_pixel(const LineTable& table, std::span<const double> a_j, double x0_j,
                                    double y0_j, const TrustRegionConfig& cfg);

struct FieldFit {
    Field x;
    Field y;
    std::vector<std::size_t> iterations;
    std::vector<bool> failed; ///< pixels whose fit raised a domain error
    double wall_time = 0.0;
};

/// Fits every pixel independently, in pixel order.
[[nodiscard]] FieldFit nf_fit_field(const LineTable& table, const PerLine& a, std::span<const double> x0,
                                    std::span<const double> y0, const TrustRegionConfig& cfg);

} // namespace tas
