#pragma once

// Cyclic fixed-point iteration and the descent pairs algorithm (DPA) for the
// per-pixel system beta_k(x, y) = a^k, k = 0..W-1.

#include "tas/phantoms.hpp"
#include "tas/spectroscopy.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace tas {

using Vector = std::vector<double>;
using Operator = std::function<Vector(std::span<const double>)>;

/// Relaxation schedule lambda(l) for step l; values are expected in [0, 2].
using Relaxation = std::function<double(std::size_t)>;

/// Iterates x <- x + lambda_l (T_{l mod W}(x) - x) for max_sweeps*W steps.
/// The result starts with x0 and holds every iterate, or only the end of each
/// sweep when every_step is false.
[[nodiscard]] std::vector<Vector> csa_iterate(std::span<const Operator> ops, std::span<const double> x0,
                                              const Relaxation& lambda, std::size_t max_sweeps,
                                              bool every_step = true);

/// One simultaneous step on both blocks:
/// (x, y) += lambda * (a^i - beta_i(x, y)) for i = l mod W.
void alternating_cfp_step(const LineTable& table, const PerLine& a, Field& x, Field& y, double lambda,
                          std::size_t l);

struct Interval {
    double lo;
    double hi;

    [[nodiscard]] double clamp(double v) const noexcept { return v < lo ? lo : (v > hi ? hi : v); }
};

struct DpaConfig {
    double lambda_x = 1000.0;
    double lambda_y = 2.0;
    std::size_t max_iter = 50;
    double residual_tol = 1e-3;
    Interval x_bounds{800.0, 2400.0}; ///< x is projected here after every inner update
    Interval y_bounds{0.0, 1.0};      ///< only used with clamp_y
    bool clamp_y = false;
    double a_floor = 1e-12; ///< lower clamp on reference coefficients in ratio denominators

    void validate() const;
};

enum class Termination { residual, max_iter };

[[nodiscard]] std::string_view to_string(Termination t) noexcept;

struct PerturbationRecord {
    std::size_t iteration;
    std::size_t inner;
    char variable; ///< 'x' or 'y'
    double phi_before;
    double phi_after;
    double eta;
    bool moved;
};

struct SolverReport {
    Field x_final;
    Field y_final;
    double initial_residual = 0.0;
    std::vector<double> residual_history; ///< after each outer iteration
    std::size_t iterations = 0;
    Termination terminated_by = Termination::max_iter;
    double wall_time = 0.0; ///< seconds

    // Superiorized runs only: target values of the iterates after each outer
    // iteration, and one record per perturbation attempt.
    std::vector<double> phi_x_history;
    std::vector<double> phi_y_history;
    std::vector<PerturbationRecord> perturbations;
};

/// sum_k ||a^k - beta_k(x, y)||_2
[[nodiscard]] double residual(const LineTable& table, const PerLine& a, std::span<const double> x,
                              std::span<const double> y);

[[nodiscard]] SolverReport dpa_run(const LineTable& table, const PerLine& a, const DpaConfig& cfg,
                                   std::span<const double> x0, std::span<const double> y0);

namespace detail {

/// Called before each inner update with (iteration, inner index, variable,
/// field); may modify the field in place.
using PerturbHook = std::function<void(std::size_t, std::size_t, char, Field&)>;
/// Called after each outer iteration with the new iterates.
using IterationHook = std::function<void(const Field&, const Field&)>;

SolverReport run_descent_pairs(const LineTable& table, const PerLine& a, const DpaConfig& cfg,
                               std::span<const double> x0, std::span<const double> y0,
                               const PerturbHook& perturb, const IterationHook& on_iteration);

} // namespace detail

} // namespace tas
