#pragma once

// Spectroscopic forward model for multi-line absorption.
//
// Every line k contributes a per-pixel absorption coefficient
//
//     alpha_k(x_j, y_j) = btilde_k(x_j) * y_j,
//     btilde_k(x)       = S_k * exp(-E_k * (1/x - 1/T0)),
//
// with x the temperature (K) and y the mole fraction. Wavelength indices are
// zero-based throughout the library.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tas {

using Field = std::vector<double>;

struct SpectralLine {
    double s = 1.0; ///< line-strength scale at the reference temperature, > 0
    double e = 0.0; ///< lower-state energy in kelvin
};

class LineTable {
public:
    /// Validates the lines (W >= 2, s > 0, e finite, t0 > 0) and selects the
    /// reference line as the lowest-energy one.
    LineTable(std::vector<SpectralLine> lines, double t0);

    /// Ten synthetic water-vapour-like lines with E_k evenly spaced on
    /// [0, 4500] K and T0 = 296 K. Strengths are scaled so that
    /// btilde_k(x) <= 0.3 for every temperature below 2600 K.
    static LineTable synthetic_default();

    /// Reads {"t0": .., "s": [..], "e": [..]} from a JSON file.
    static LineTable load(const std::filesystem::path& path);
    static LineTable parse(const std::string& text);
    [[nodiscard]] std::string to_json() const;

    [[nodiscard]] std::size_t size() const noexcept { return lines_.size(); }
    [[nodiscard]] const SpectralLine& line(std::size_t k) const;
    [[nodiscard]] const std::vector<SpectralLine>& lines() const noexcept { return lines_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] std::size_t reference() const noexcept { return t_ref_; }

private:
    std::vector<SpectralLine> lines_;
    double t0_;
    std::size_t t_ref_;
};

/// Lowest index attaining min_k E_k.
[[nodiscard]] std::size_t select_reference_index(std::span<const SpectralLine> lines);

/// Scalar kernels, unchecked. Used by the solvers' inner loops.
[[nodiscard]] double beta_tilde_scalar(const SpectralLine& line, double t0, double x) noexcept;
[[nodiscard]] double ratio_scalar(const SpectralLine& line, const SpectralLine& ref, double t0,
                                  double x) noexcept;

[[nodiscard]] Field beta_tilde(const LineTable& table, std::size_t k, std::span<const double> x);

/// alpha_k evaluated on whole fields: diag(btilde_k(x)) y.
[[nodiscard]] Field beta(const LineTable& table, std::size_t k, std::span<const double> x,
                         std::span<const double> y);

/// f_k(x) = btilde_k(x) / btilde_t(x) componentwise, evaluated in closed form.
[[nodiscard]] Field ratio_f(const LineTable& table, std::size_t k, std::span<const double> x);

/// Gradient of g_k(x) = 0.5 * ||f_k(x) - target||^2.
[[nodiscard]] Field grad_g(const LineTable& table, std::size_t k, std::span<const double> x,
                           std::span<const double> target);

/// Gradient in y of h_k(y) = 0.5 * ||target - beta_k(x_fixed, y)||^2.
[[nodiscard]] Field grad_h(const LineTable& table, std::size_t k, std::span<const double> x_fixed,
                           std::span<const double> y, std::span<const double> target);

} // namespace tas
