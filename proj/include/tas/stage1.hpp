#pragma once

// Per-wavelength recovery of absorption coefficients from sinograms with
// cyclic row-action projections (ART / Kaczmarz), optionally superiorized
// with total-variation perturbations.

#include "tas/geometry.hpp"
#include "tas/phantoms.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tas {

struct ArtSuperiorization {
    double eta0 = 0.0;       ///< initial step; 0 picks 5 * (mean coefficient) * sqrt(M)
    double gamma = 0.999;
    std::size_t max_shrinks = 500;
    double tv_epsilon = 1e-5;
};

struct ArtConfig {
    double relaxation = 1.0;   ///< in (0, 2)
    std::size_t sweeps = 500;  ///< maximum number of full passes over the rows
    bool nonneg = true;        ///< clamp negative coefficients after each sweep
    double residual_tol = 1e-6; ///< stop once ||L a - b|| <= residual_tol * ||b||
    std::optional<ArtSuperiorization> superiorize;

    void validate() const;
};

/// a <- a + relaxation * (b_i - <L_i, a>) / ||L_i||^2 * L_i. Zero rows are skipped.
void kaczmarz_step(const SystemMatrix& L, std::size_t row, double b_i, std::span<double> a,
                   double relaxation);

struct ArtResult {
    std::vector<double> a;
    std::vector<double> residual_history; ///< ||L a - b|| after each sweep
    std::size_t sweeps = 0;
    bool converged = false;
};

/// Solves one wavelength from the given start (zeros when empty).
[[nodiscard]] ArtResult art_solve(const SystemMatrix& L, std::span<const double> b, const ArtConfig& cfg,
                                  std::span<const double> start = {});

struct Stage1Result {
    PerLine a;
    std::vector<ArtResult> details;
};

/// Runs art_solve from zero for every wavelength. Wavelengths are independent
/// and run on separate threads unless single_thread is set; the result does
/// not depend on the choice.
[[nodiscard]] Stage1Result solve_abs_coeffs(const SystemMatrix& L, const PerLine& b, const ArtConfig& cfg,
                                            bool single_thread = true);

} // namespace tas
