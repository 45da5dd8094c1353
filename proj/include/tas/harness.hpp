#pragma once

// Experiment pipelines: geometry -> phantom -> sinogram -> noise -> stage-1
// ART -> stage-2 solver -> metrics, plus the gridding-scale sweep.

#include "tas/geometry.hpp"
#include "tas/nf_baseline.hpp"
#include "tas/phantoms.hpp"
#include "tas/solver_core.hpp"
#include "tas/spectroscopy.hpp"
#include "tas/stage1.hpp"
#include "tas/superiorization.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tas {

enum class PhantomKind { flame, gaussians };
enum class Algorithm { dpa, sup_dpa, nf };

[[nodiscard]] std::string_view to_string(PhantomKind p) noexcept;
[[nodiscard]] std::string_view to_string(Algorithm a) noexcept;
[[nodiscard]] std::string_view to_string(PriorKind p) noexcept;
[[nodiscard]] std::string_view to_string(TikVariant v) noexcept;
[[nodiscard]] PhantomKind parse_phantom(std::string_view s);
[[nodiscard]] Algorithm parse_algorithm(std::string_view s);
[[nodiscard]] PriorKind parse_prior(std::string_view s);
[[nodiscard]] TikVariant parse_tik_variant(std::string_view s);

/// Initial-guess box for a phantom: (400, 2000) K for the flame,
/// (800, 2400) K for the Gaussians, (0.005, 0.2) mole fraction for both.
struct InitBox {
    Interval x;
    Interval y;
};
[[nodiscard]] InitBox init_box(PhantomKind p) noexcept;

struct ExperimentConfig {
    PhantomKind phantom = PhantomKind::gaussians;
    std::size_t grid = 40;
    std::size_t beams_per_direction = 0; ///< 0 means equal to grid
    double noise = 0.02;
    std::uint64_t seed = 20240504;
    Algorithm algorithm = Algorithm::dpa;
    std::optional<PriorKind> prior; ///< default: TV for the flame, Tik for the Gaussians
    TikVariant tik_variant = TikVariant::standard;

    double lambda_x = 1000.0;
    double lambda_y = 2.0;
    std::optional<double> eta_x; ///< default: 5e6 with TV, 5e4 with Tik
    double eta_y = 10.0;
    double gamma = 0.999;
    std::size_t max_shrinks = 500;
    std::size_t max_iter = 50;
    double tol = 1e-3;
    bool clamp_y = false;

    ArtConfig art;
    TrustRegionConfig trust_region; ///< bounds are overwritten from the phantom's box

    bool exact_stage1 = false;
    bool single_thread = false;
    std::optional<std::filesystem::path> line_table;
    std::optional<std::filesystem::path> out_dir;
    bool dump_stage1 = false;
    bool dump_matrix = false;
    bool dump_nf_iterations = false;

    [[nodiscard]] std::size_t beams() const noexcept { return beams_per_direction ? beams_per_direction : grid; }
    [[nodiscard]] PriorKind resolved_prior() const noexcept;
    [[nodiscard]] double resolved_eta_x() const noexcept;
    [[nodiscard]] LineTable load_lines() const;
    void validate() const;
};

struct Metrics {
    double error_x = 0.0;
    double error_y = 0.0;
    double wall_time = 0.0; ///< stage-2 only, seconds
    std::size_t iterations = 0; ///< outer iterations (DPA) or summed trust-region iterations (NF)
    double final_residual = 0.0;

    bool operator==(const Metrics&) const = default;
};

/// ||rec - act||_2 / ||act||_2. Throws DomainError when act is zero.
[[nodiscard]] double relative_error(std::span<const double> rec, std::span<const double> act);

/// Everything up to and including stage 1, shared by all stage-2 algorithms.
struct Problem {
    LineTable table;
    Grid grid;
    std::vector<Beam> beams;
    SystemMatrix matrix;
    Phantom phantom;
    PerLine sinogram_clean;
    PerLine sinogram;
    PerLine coefficients; ///< stage-1 output (or the exact coefficients)
    Field x0;
    Field y0;
    InitBox box;
};

[[nodiscard]] Problem prepare_problem(const ExperimentConfig& cfg);

struct Stage2Result {
    Field x;
    Field y;
    Metrics metrics;
    std::optional<SolverReport> report;   ///< DPA and SUP-DPA
    std::vector<std::size_t> nf_iterations; ///< NF per-pixel counts
};

[[nodiscard]] Stage2Result run_stage2(const Problem& problem, const ExperimentConfig& cfg, Algorithm algo);

struct PipelineResult {
    Problem problem;
    Stage2Result stage2;
};

/// Full pipeline for cfg.algorithm; writes artifacts when cfg.out_dir is set.
[[nodiscard]] PipelineResult run_pipeline(const ExperimentConfig& cfg);

/// Writes the phantom and sinogram files of the simulate command.
void write_simulation(const Problem& problem, const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct SweepRow {
    std::size_t scale;
    Algorithm algorithm;
    Metrics metrics;
};

/// Gaussians phantom at each scale G with G beams per direction, all three
/// algorithms on a shared stage-1 result. Cells run sequentially so that the
/// timings are comparable.
[[nodiscard]] std::vector<SweepRow> run_grid_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> scales);

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

void write_metrics_csv(std::ostream& os, std::span<const Metrics> rows, bool with_time);
[[nodiscard]] std::vector<Metrics> read_metrics_csv(std::istream& is);

/// key = value lines for every resolved parameter.
[[nodiscard]] std::string manifest(const ExperimentConfig& cfg, const LineTable& table);

} // namespace tas
