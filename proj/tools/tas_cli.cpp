#include "tas/errors.hpp"
#include "tas/harness.hpp"
#include "tas/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

struct Flags {
    std::string phantom = "gaussians";
    std::string algo = "dpa";
    std::string prior;
    std::string tik_variant = "standard";
    std::string out;
    std::string lines;
    double eta_x = 0.0;
    bool art_sup = false;
};

void add_problem_flags(CLI::App* cmd, tas::ExperimentConfig& cfg, Flags& f) {
    cmd->add_option("--phantom", f.phantom, "flame or gaussians")->check(CLI::IsMember({"flame", "gaussians"}));
    cmd->add_option("--grid", cfg.grid, "pixels per side");
    cmd->add_option("--beams-per-direction", cfg.beams_per_direction, "beams per direction (default: grid)");
    cmd->add_option("--noise", cfg.noise, "uniform noise level u");
    cmd->add_option("--seed", cfg.seed, "noise and initial-guess seed");
    cmd->add_option("--lines", f.lines, "line table JSON (t0, s, e)");
    cmd->add_flag("--dump-matrix", cfg.dump_matrix, "write the system matrix as triplets");
}

void add_solver_flags(CLI::App* cmd, tas::ExperimentConfig& cfg, Flags& f) {
    cmd->add_option("--algo", f.algo, "dpa, sup-dpa or nf")->check(CLI::IsMember({"dpa", "sup-dpa", "nf"}));
    cmd->add_option("--prior", f.prior, "tv or tik (default depends on phantom)")
        ->check(CLI::IsMember({"tv", "tik"}));
    cmd->add_option("--tik-variant", f.tik_variant, "standard or as-printed")
        ->check(CLI::IsMember({"standard", "as-printed"}));
    cmd->add_option("--lambda-x", cfg.lambda_x, "x-sweep step");
    cmd->add_option("--lambda-y", cfg.lambda_y, "y-sweep step");
    cmd->add_option("--eta-x", f.eta_x, "initial x perturbation length (default depends on prior)");
    cmd->add_option("--eta-y", cfg.eta_y, "initial y perturbation length");
    cmd->add_option("--gamma", cfg.gamma, "perturbation shrink factor");
    cmd->add_option("--max-shrinks", cfg.max_shrinks, "shrink attempts per perturbation");
    cmd->add_option("--max-iter", cfg.max_iter, "outer iteration cap");
    cmd->add_option("--tol", cfg.tol, "residual stopping threshold");
    cmd->add_flag("--clamp-y", cfg.clamp_y, "project y onto [0, 1] after each update");
    cmd->add_flag("--exact-stage1", cfg.exact_stage1, "skip ART and use the exact coefficients");
    cmd->add_flag("--single-thread", cfg.single_thread, "solve stage 1 on one thread");
    cmd->add_option("--art-sweeps", cfg.art.sweeps, "ART sweep limit");
    cmd->add_option("--art-relaxation", cfg.art.relaxation, "ART relaxation");
    cmd->add_flag("--art-superiorize", f.art_sup, "TV-superiorized ART");
    cmd->add_option("--nf-max-iter", cfg.trust_region.max_iter, "trust-region iteration cap per pixel");
    cmd->add_flag("--dump-stage1", cfg.dump_stage1, "write stage-1 coefficient grids");
    cmd->add_flag("--dump-nf-iterations", cfg.dump_nf_iterations, "write NF per-pixel iteration counts");
}

void resolve(tas::ExperimentConfig& cfg, const Flags& f) {
    cfg.phantom = tas::parse_phantom(f.phantom);
    cfg.algorithm = tas::parse_algorithm(f.algo);
    if (!f.prior.empty()) {
        cfg.prior = tas::parse_prior(f.prior);
    }
    cfg.tik_variant = tas::parse_tik_variant(f.tik_variant);
    if (f.eta_x > 0.0) {
        cfg.eta_x = f.eta_x;
    }
    if (!f.out.empty()) {
        cfg.out_dir = f.out;
    }
    if (!f.lines.empty()) {
        cfg.line_table = f.lines;
    }
    if (f.art_sup) {
        cfg.art.superiorize = tas::ArtSuperiorization{};
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage tomographic absorption spectroscopy reconstruction"};
    app.require_subcommand(1);

    tas::ExperimentConfig cfg;
    Flags f;

    auto* sim = app.add_subcommand("simulate", "write phantom and sinogram");
    add_problem_flags(sim, cfg, f);
    sim->add_option("--out", f.out, "output directory")->required();

    auto* rec = app.add_subcommand("reconstruct", "run the full pipeline");
    add_problem_flags(rec, cfg, f);
    add_solver_flags(rec, cfg, f);
    rec->add_option("--out", f.out, "output directory");

    std::vector<std::size_t> scales{20, 40, 60, 80};
    auto* sweep = app.add_subcommand("sweep", "gridding-scale timing study on the Gaussians phantom");
    sweep->add_option("--scales", scales, "grid sizes");
    sweep->add_option("--noise", cfg.noise, "uniform noise level u");
    sweep->add_option("--seed", cfg.seed, "noise and initial-guess seed");
    sweep->add_option("--lines", f.lines, "line table JSON");
    sweep->add_option("--out", f.out, "output CSV file (default: stdout)");
    sweep->add_flag("--exact-stage1", cfg.exact_stage1, "skip ART");

    CLI11_PARSE(app, argc, argv);

    try {
        resolve(cfg, f);
        if (*sim) {
            cfg.exact_stage1 = true; // stage 1 output is not written by simulate
            const auto p = tas::prepare_problem(cfg);
            tas::write_simulation(p, cfg, *cfg.out_dir);
            tas::io::write_file(*cfg.out_dir / "manifest.txt", tas::manifest(cfg, p.table));
        } else if (*rec) {
            const auto r = tas::run_pipeline(cfg);
            const auto& m = r.stage2.metrics;
            std::cout << "algorithm " << tas::to_string(cfg.algorithm) << "\nerror_x " << m.error_x << "\nerror_y "
                      << m.error_y << "\niterations " << m.iterations << "\nresidual " << m.final_residual
                      << "\nstage2_time " << m.wall_time << "s\n";
        } else {
            cfg.phantom = tas::PhantomKind::gaussians;
            cfg.single_thread = true;
            const auto rows = tas::run_grid_sweep(cfg, scales);
            std::ostringstream os;
            tas::write_sweep_csv(os, rows);
            if (f.out.empty()) {
                std::cout << os.str();
            } else {
                tas::io::write_file(f.out, os.str());
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
