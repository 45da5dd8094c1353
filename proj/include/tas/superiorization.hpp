#pragma once

// Target functions for superiorization (total variation and a Tikhonov-type
// smoothness prior on n-by-n fields), the step-shrinking perturbation, and the
// superiorized descent-pairs driver.
//
// Fields are stored row-major: Z(i, j) = z[i*n + j].

#include "tas/solver_core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tas {

enum class PriorKind { tv, tik };
enum class TikVariant {
    standard,  ///< sum (Z - neighbour mean)^2
    as_printed ///< sum (Z - (1/rn) sum (Z_nb - Z))^2 = sum (2Z - neighbour mean)^2
};

struct TargetFunction {
    PriorKind kind = PriorKind::tv;
    double tv_epsilon = 1e-5; ///< added under the square root of every TV term
    TikVariant tik_variant = TikVariant::standard;
};

[[nodiscard]] double tv(std::span<const double> z, std::size_t n, double epsilon);
/// Requires epsilon > 0.
[[nodiscard]] std::vector<double> grad_tv(std::span<const double> z, std::size_t n, double epsilon);

/// Requires n >= 2 (every pixel must have a neighbour).
[[nodiscard]] double tik(std::span<const double> z, std::size_t n, TikVariant variant);
[[nodiscard]] std::vector<double> grad_tik(std::span<const double> z, std::size_t n, TikVariant variant);

[[nodiscard]] double evaluate(const TargetFunction& phi, std::span<const double> z, std::size_t n);
[[nodiscard]] std::vector<double> gradient(const TargetFunction& phi, std::span<const double> z,
                                           std::size_t n);

struct PerturbResult {
    std::vector<double> z;
    double eta = 0.0;
    double phi_before = 0.0;
    double phi_after = 0.0;
    std::size_t shrinks = 0;
    bool moved = false;
};

/// Steps along the normalised negative gradient of phi. The step length eta is
/// multiplied by gamma until the step does not increase phi; if that needs more
/// than max_shrinks contractions the field is returned unchanged. The returned
/// eta is meant to be carried into the next call.
[[nodiscard]] PerturbResult perturb(std::span<const double> z, std::size_t n, const TargetFunction& phi,
                                    double eta, double gamma, std::size_t max_shrinks);

struct SupConfig {
    DpaConfig dpa;
    double eta_x0 = 5e6;
    double eta_y0 = 10.0;
    double gamma = 0.999;
    std::size_t max_shrinks = 500;
    bool perturb_x = true;
    bool perturb_y = true;

    void validate() const;
};

/// Superiorized descent pairs: before every inner update of x (and of y) the
/// current field is perturbed to reduce phi, and the update is taken from the
/// perturbed point. With both perturb flags off this reproduces dpa_run
/// exactly.
[[nodiscard]] SolverReport sup_dpa_run(const LineTable& table, const PerLine& a, const SupConfig& cfg,
                                       const TargetFunction& phi, std::size_t n,
                                       std::span<const double> x0, std::span<const double> y0);

} // namespace tas
