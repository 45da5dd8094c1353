#include "tas/harness.hpp"

#include "tas/errors.hpp"
#include "tas/io.hpp"
#include "tas/random.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tas {

std::string_view to_string(PhantomKind p) noexcept {
    return p == PhantomKind::flame ? "flame" : "gaussians";
}

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::dpa:
        return "dpa";
    case Algorithm::sup_dpa:
        return "sup-dpa";
    case Algorithm::nf:
        return "nf";
    }
    return "unknown";
}

std::string_view to_string(PriorKind p) noexcept { return p == PriorKind::tv ? "tv" : "tik"; }

std::string_view to_string(TikVariant v) noexcept {
    return v == TikVariant::standard ? "standard" : "as-printed";
}

PhantomKind parse_phantom(std::string_view s) {
    if (s == "flame") {
        return PhantomKind::flame;
    }
    if (s == "gaussians") {
        return PhantomKind::gaussians;
    }
    throw ConfigError("unknown phantom '" + std::string(s) + "'");
}

Algorithm parse_algorithm(std::string_view s) {
    if (s == "dpa") {
        return Algorithm::dpa;
    }
    if (s == "sup-dpa") {
        return Algorithm::sup_dpa;
    }
    if (s == "nf") {
        return Algorithm::nf;
    }
    throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

PriorKind parse_prior(std::string_view s) {
    if (s == "tv") {
        return PriorKind::tv;
    }
    if (s == "tik") {
        return PriorKind::tik;
    }
    throw ConfigError("unknown prior '" + std::string(s) + "'");
}

TikVariant parse_tik_variant(std::string_view s) {
    if (s == "standard") {
        return TikVariant::standard;
    }
    if (s == "as-printed") {
        return TikVariant::as_printed;
    }
    throw ConfigError("unknown Tikhonov variant '" + std::string(s) + "'");
}

InitBox init_box(PhantomKind p) noexcept {
    if (p == PhantomKind::flame) {
        return {{400.0, 2000.0}, {0.005, 0.2}};
    }
    return {{800.0, 2400.0}, {0.005, 0.2}};
}

PriorKind ExperimentConfig::resolved_prior() const noexcept {
    if (prior) {
        return *prior;
    }
    return phantom == PhantomKind::flame ? PriorKind::tv : PriorKind::tik;
}

double ExperimentConfig::resolved_eta_x() const noexcept {
    if (eta_x) {
        return *eta_x;
    }
    return resolved_prior() == PriorKind::tv ? 5e6 : 5e4;
}

LineTable ExperimentConfig::load_lines() const {
    return line_table ? LineTable::load(*line_table) : LineTable::synthetic_default();
}

void ExperimentConfig::validate() const {
    if (grid < 2) {
        throw ConfigError("grid must have at least 2 pixels per side");
    }
    if (!(noise >= 0.0)) {
        throw ConfigError("noise level must be nonnegative");
    }
    art.validate();
}

double relative_error(std::span<const double> rec, std::span<const double> act) {
    if (rec.size() != act.size()) {
        throw ShapeError("relative_error: length mismatch");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < act.size(); ++j) {
        const double d = rec[j] - act[j];
        num += d * d;
        den += act[j] * act[j];
    }
    if (den == 0.0) {
        throw DomainError("relative_error: reference field is zero");
    }
    return std::sqrt(num) / std::sqrt(den);
}

Problem prepare_problem(const ExperimentConfig& cfg) {
    cfg.validate();
    Problem p{cfg.load_lines(), Grid(cfg.grid), {}, {}, {}, {}, {}, {}, {}, {}, init_box(cfg.phantom)};
    p.beams = make_standard_beams(p.grid, cfg.beams());
    p.matrix = build_system_matrix(p.grid, p.beams);
    p.phantom = cfg.phantom == PhantomKind::flame ? phantom_flame(p.grid) : phantom_two_gaussians(p.grid);
    p.sinogram_clean = forward_project(p.matrix, p.table, p.phantom);
    p.sinogram = add_uniform_noise(p.sinogram_clean, {cfg.noise, cfg.seed});
    if (cfg.exact_stage1) {
        p.coefficients = true_abs_coeffs(p.table, p.phantom);
    } else {
        p.coefficients = solve_abs_coeffs(p.matrix, p.sinogram, cfg.art, cfg.single_thread).a;
    }
    // Initial guesses use their own stream so that they do not depend on
    // whether noise was drawn.
    UniformStream rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    const std::size_t m = p.grid.pixel_count();
    p.x0.resize(m);
    p.y0.resize(m);
    for (double& v : p.x0) {
        v = rng.between(p.box.x.lo, p.box.x.hi);
    }
    for (double& v : p.y0) {
        v = rng.between(p.box.y.lo, p.box.y.hi);
    }
    return p;
}

namespace {

DpaConfig dpa_config(const ExperimentConfig& cfg, const InitBox& box) {
    DpaConfig d;
    d.lambda_x = cfg.lambda_x;
    d.lambda_y = cfg.lambda_y;
    d.max_iter = cfg.max_iter;
    d.residual_tol = cfg.tol;
    d.x_bounds = box.x;
    d.clamp_y = cfg.clamp_y;
    return d;
}

} // namespace

Stage2Result run_stage2(const Problem& problem, const ExperimentConfig& cfg, Algorithm algo) {
    Stage2Result out;
    const auto& a = problem.coefficients;
    switch (algo) {
    case Algorithm::dpa: {
        out.report = dpa_run(problem.table, a, dpa_config(cfg, problem.box), problem.x0, problem.y0);
        break;
    }
    case Algorithm::sup_dpa: {
        SupConfig sc;
        sc.dpa = dpa_config(cfg, problem.box);
        sc.eta_x0 = cfg.resolved_eta_x();
        sc.eta_y0 = cfg.eta_y;
        sc.gamma = cfg.gamma;
        sc.max_shrinks = cfg.max_shrinks;
        const TargetFunction phi{cfg.resolved_prior(), 1e-5, cfg.tik_variant};
        out.report = sup_dpa_run(problem.table, a, sc, phi, problem.grid.n, problem.x0, problem.y0);
        break;
    }
    case Algorithm::nf: {
        TrustRegionConfig tr = cfg.trust_region;
        tr.x_bounds = problem.box.x;
        const auto fit = nf_fit_field(problem.table, a, problem.x0, problem.y0, tr);
        out.x = fit.x;
        out.y = fit.y;
        out.metrics.wall_time = fit.wall_time;
        for (const auto it : fit.iterations) {
            out.metrics.iterations += it;
        }
        out.nf_iterations = fit.iterations;
        break;
    }
    }
    if (out.report) {
        out.x = out.report->x_final;
        out.y = out.report->y_final;
        out.metrics.wall_time = out.report->wall_time;
        out.metrics.iterations = out.report->iterations;
    }
    out.metrics.error_x = relative_error(out.x, problem.phantom.x_true);
    out.metrics.error_y = relative_error(out.y, problem.phantom.y_true);
    out.metrics.final_residual = residual(problem.table, a, out.x, out.y);
    return out;
}

namespace {

std::string grid_csv(std::span<const double> f, std::size_t n) {
    std::ostringstream os;
    io::write_grid_csv(os, f, n);
    return os.str();
}

std::string sinogram_csv(const PerLine& b) {
    std::vector<std::string> header{"beam"};
    for (std::size_t k = 0; k < b.size(); ++k) {
        header.push_back("line" + std::to_string(k));
    }
    std::vector<std::vector<double>> rows(b.empty() ? 0 : b.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].push_back(static_cast<double>(i));
        for (const auto& bk : b) {
            rows[i].push_back(bk[i]);
        }
    }
    std::ostringstream os;
    io::write_table_csv(os, header, rows);
    return os.str();
}

} // namespace

void write_simulation(const Problem& problem, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::size_t n = problem.grid.n;
    io::write_file(dir / "phantom_x.csv", grid_csv(problem.phantom.x_true, n));
    io::write_file(dir / "phantom_y.csv", grid_csv(problem.phantom.y_true, n));
    io::write_file(dir / "sinogram_clean.csv", sinogram_csv(problem.sinogram_clean));
    io::write_file(dir / "sinogram.csv", sinogram_csv(problem.sinogram));
    io::write_file(dir / "lines.json", problem.table.to_json() + "\n");
    if (cfg.dump_matrix) {
        std::ostringstream os;
        problem.matrix.write_triplets(os);
        io::write_file(dir / "matrix.txt", os.str());
    }
}

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
    PipelineResult res{prepare_problem(cfg), {}};
    res.stage2 = run_stage2(res.problem, cfg, cfg.algorithm);
    if (!cfg.out_dir) {
        return res;
    }
    const auto& dir = *cfg.out_dir;
    const auto& p = res.problem;
    const std::size_t n = p.grid.n;
    write_simulation(p, cfg, dir);
    io::write_file(dir / "recon_x.csv", grid_csv(res.stage2.x, n));
    io::write_file(dir / "recon_y.csv", grid_csv(res.stage2.y, n));
    if (cfg.dump_stage1) {
        for (std::size_t k = 0; k < p.coefficients.size(); ++k) {
            io::write_file(dir / ("stage1_line" + std::to_string(k) + ".csv"), grid_csv(p.coefficients[k], n));
        }
    }
    if (const auto& rep = res.stage2.report) {
        std::vector<std::string> header{"iteration", "residual"};
        const bool sup = !rep->phi_x_history.empty();
        if (sup) {
            header.insert(header.end(), {"phi_x", "phi_y"});
        }
        std::vector<std::vector<double>> rows;
        rows.push_back({0.0, rep->initial_residual});
        if (sup) {
            rows.back().insert(rows.back().end(), {std::nan(""), std::nan("")});
        }
        for (std::size_t l = 0; l < rep->residual_history.size(); ++l) {
            rows.push_back({static_cast<double>(l + 1), rep->residual_history[l]});
            if (sup) {
                rows.back().insert(rows.back().end(), {rep->phi_x_history[l], rep->phi_y_history[l]});
            }
        }
        std::ostringstream os;
        io::write_table_csv(os, header, rows);
        io::write_file(dir / "history.csv", os.str());
    }
    if (cfg.dump_nf_iterations && !res.stage2.nf_iterations.empty()) {
        std::vector<double> counts(res.stage2.nf_iterations.begin(), res.stage2.nf_iterations.end());
        io::write_file(dir / "nf_iterations.csv", grid_csv(counts, n));
    }
    {
        std::ostringstream os;
        const Metrics m[] = {res.stage2.metrics};
        write_metrics_csv(os, m, false);
        io::write_file(dir / "metrics.csv", os.str());
    }
    io::write_file(dir / "manifest.txt", manifest(cfg, p.table) + "stage2_wall_time = " +
                                             io::format_double(res.stage2.metrics.wall_time) + "\n");
    return res;
}

std::vector<SweepRow> run_grid_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> scales) {
    std::vector<SweepRow> rows;
    for (const std::size_t g : scales) {
        ExperimentConfig c = cfg;
        c.grid = g;
        c.beams_per_direction = g;
        const Problem p = prepare_problem(c);
        for (const Algorithm algo : {Algorithm::dpa, Algorithm::sup_dpa, Algorithm::nf}) {
            rows.push_back({g, algo, run_stage2(p, c, algo).metrics});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    os << "scale,algo,time,error_x,error_y,iterations,residual\n";
    for (const auto& r : rows) {
        os << r.scale << ',' << to_string(r.algorithm) << ',' << io::format_double(r.metrics.wall_time) << ','
           << io::format_double(r.metrics.error_x) << ',' << io::format_double(r.metrics.error_y) << ','
           << r.metrics.iterations << ',' << io::format_double(r.metrics.final_residual) << '\n';
    }
}

void write_metrics_csv(std::ostream& os, std::span<const Metrics> rows, bool with_time) {
    os << "error_x,error_y," << (with_time ? "wall_time," : "") << "iterations,final_residual\n";
    for (const auto& m : rows) {
        os << io::format_double(m.error_x) << ',' << io::format_double(m.error_y) << ',';
        if (with_time) {
            os << io::format_double(m.wall_time) << ',';
        }
        os << m.iterations << ',' << io::format_double(m.final_residual) << '\n';
    }
}

std::vector<Metrics> read_metrics_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("metrics CSV: missing header");
    }
    const auto header = io::split_csv_line(line);
    const bool with_time = header.size() == 5;
    if (header.size() != 4 && !with_time) {
        throw ConfigError("metrics CSV: unexpected header");
    }
    std::vector<Metrics> out;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto c = io::split_csv_line(line);
        if (c.size() != header.size()) {
            throw ConfigError("metrics CSV: wrong number of columns");
        }
        Metrics m;
        std::size_t i = 0;
        m.error_x = io::parse_double(c[i++]);
        m.error_y = io::parse_double(c[i++]);
        if (with_time) {
            m.wall_time = io::parse_double(c[i++]);
        }
        m.iterations = static_cast<std::size_t>(std::stoull(c[i++]));
        m.final_residual = io::parse_double(c[i++]);
        out.push_back(m);
    }
    return out;
}

std::string manifest(const ExperimentConfig& cfg, const LineTable& table) {
    std::ostringstream os;
    const auto kv = [&](std::string_view k, const auto& v) { os << k << " = " << v << '\n'; };
    const auto num = [](double v) { return io::format_double(v); };
    const auto box = init_box(cfg.phantom);
    kv("phantom", to_string(cfg.phantom));
    kv("grid", cfg.grid);
    kv("beams_per_direction", cfg.beams());
    kv("directions", "0,45,90,135");
    kv("noise", num(cfg.noise));
    kv("seed", cfg.seed);
    kv("algorithm", to_string(cfg.algorithm));
    kv("prior", to_string(cfg.resolved_prior()));
    kv("tik_variant", to_string(cfg.tik_variant));
    kv("tv_epsilon", num(1e-5));
    kv("lambda_x", num(cfg.lambda_x));
    kv("lambda_y", num(cfg.lambda_y));
    kv("eta_x", num(cfg.resolved_eta_x()));
    kv("eta_y", num(cfg.eta_y));
    kv("gamma", num(cfg.gamma));
    kv("max_shrinks", cfg.max_shrinks);
    kv("max_iter", cfg.max_iter);
    kv("tol", num(cfg.tol));
    kv("clamp_y", cfg.clamp_y);
    kv("x_bounds", num(box.x.lo) + "," + num(box.x.hi));
    kv("y_init", num(box.y.lo) + "," + num(box.y.hi));
    kv("exact_stage1", cfg.exact_stage1);
    kv("art_relaxation", num(cfg.art.relaxation));
    kv("art_sweeps", cfg.art.sweeps);
    kv("art_nonneg", cfg.art.nonneg);
    kv("art_residual_tol", num(cfg.art.residual_tol));
    kv("art_superiorize", cfg.art.superiorize.has_value());
    kv("nf_delta0", num(cfg.trust_region.delta0 > 0.0
                            ? cfg.trust_region.delta0
                            : std::hypot(box.x.hi - box.x.lo,
                                         cfg.trust_region.y_bounds.hi - cfg.trust_region.y_bounds.lo)));
    kv("nf_delta_min", num(cfg.trust_region.delta_min));
    kv("nf_f_tol", num(cfg.trust_region.f_tol));
    kv("nf_max_iter", cfg.trust_region.max_iter);
    kv("single_thread", cfg.single_thread);
    kv("line_table", cfg.line_table ? cfg.line_table->string() : std::string("synthetic-default"));
    kv("t0", num(table.t0()));
    kv("reference_line", table.reference());
    std::string s;
    std::string e;
    for (const auto& l : table.lines()) {
        s += (s.empty() ? "" : ",") + num(l.s);
        e += (e.empty() ? "" : ",") + num(l.e);
    }
    kv("line_s", s);
    kv("line_e", e);
    return os.str();
}

} // namespace tas
