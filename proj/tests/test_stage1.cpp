#include "oracles.hpp"

#include "tas/errors.hpp"
#include "tas/geometry.hpp"
#include "tas/phantoms.hpp"
#include "tas/stage1.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tas;

namespace {

SystemMatrix dense_matrix(const std::vector<std::vector<double>>& A) {
    std::vector<std::vector<RowEntry>> rows;
    for (const auto& r : A) {
        std::vector<RowEntry> row;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (r[j] != 0.0) {
                row.push_back({j, r[j]});
            }
        }
        rows.push_back(row);
    }
    return SystemMatrix(A.front().size(), rows);
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) { return oracle::rel_diff(a, b); }

} // namespace

TEST_CASE("single row projection") {
    const auto L = dense_matrix({{1.0, 2.0, 0.0}, {0.0, 1.0, 1.0}});
    std::vector<double> a{0.3, -0.2, 0.9};
    kaczmarz_step(L, 0, 5.0, a, 1.0);
    CHECK(L.row_dot(0, a) == doctest::Approx(5.0).epsilon(1e-15));
    const auto before = a;
    kaczmarz_step(L, 0, 5.0, a, 1.0);
    CHECK(oracle::rel_diff(a, before) < 1e-15);
    const auto Z = SystemMatrix(2, {{}, {{0, 1.0}}});
    std::vector<double> z{1.0, 1.0};
    kaczmarz_step(Z, 0, 3.0, z, 1.0);
    CHECK(z == std::vector<double>{1.0, 1.0});
}

TEST_CASE("identity rows are solved in one sweep") {
    const auto L = dense_matrix({{1.0, 0.0}, {0.0, 1.0}});
    const std::vector<double> b{2.5, 0.75};
    ArtConfig cfg;
    cfg.sweeps = 1;
    const auto r = art_solve(L, b, cfg);
    CHECK(r.sweeps == 1);
    CHECK(r.converged);
    CHECK(r.a == oracle::dense_solve({{1.0, 0.0}, {0.0, 1.0}}, b));
}

TEST_CASE("trivial starts") {
    const Grid g(8);
    const auto L = build_system_matrix(g, make_standard_beams(g, 8));
    ArtConfig cfg;
    const auto z = art_solve(L, std::vector<double>(L.rows(), 0.0), cfg);
    CHECK(z.sweeps == 0);
    CHECK(z.converged);
    for (double v : z.a) {
        CHECK(v == 0.0);
    }
    const auto t = LineTable::synthetic_default();
    const auto ph = phantom_flame(g);
    const auto a = true_abs_coeffs(t, ph);
    const auto b = forward_project(L, t, ph);
    const auto r = art_solve(L, b[3], cfg, a[3]);
    CHECK(r.sweeps == 0);
    CHECK(r.converged);
    CHECK(r.a == a[3]);
}

TEST_CASE("determined system is recovered") {
    // 36 directions on an 8x8 grid: full column rank.
    const Grid g(8);
    std::vector<double> dirs;
    for (int d = 0; d < 36; ++d) {
        dirs.push_back(5.0 * d + 1.3);
    }
    const auto L = build_system_matrix(g, make_parallel_beams(g, dirs, 16));
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.01, 0.3);
    ArtConfig cfg;
    cfg.sweeps = 500;
    cfg.residual_tol = 1e-12;
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> truth(g.pixel_count());
        for (double& v : truth) {
            v = u(rng);
        }
        const auto b = L.multiply(truth);
        const auto r = art_solve(L, b, cfg);
        CHECK(rel_err(r.a, truth) < 0.05);
    }
}

TEST_CASE("standard arrangement: residual converges, TV superiorization lowers the error") {
    const Grid g(40);
    const auto L = build_system_matrix(g, make_standard_beams(g, 40));
    const auto t = LineTable::synthetic_default();
    const auto ph = phantom_two_gaussians(g);
    const auto a = true_abs_coeffs(t, ph);
    const auto b = forward_project(L, t, ph);
    ArtConfig plain;
    ArtConfig sup;
    sup.superiorize = ArtSuperiorization{};
    const auto rp = art_solve(L, b[0], plain);
    const auto rs = art_solve(L, b[0], sup);
    CHECK(rp.converged);
    CHECK(rp.sweeps <= 500);
    CHECK(rel_err(rs.a, a[0]) < rel_err(rp.a, a[0]));
}

TEST_CASE("residual is nonincreasing on consistent systems") {
    const auto t = LineTable::synthetic_default();
    for (std::size_t n : {10u, 24u}) {
        const Grid g(n);
        const auto L = build_system_matrix(g, make_standard_beams(g, n));
        const auto ph = phantom_flame(g);
        const auto b = forward_project(L, t, ph);
        ArtConfig cfg;
        cfg.nonneg = false;
        cfg.residual_tol = 1e-12;
        cfg.sweeps = 200;
        for (std::size_t k : {0u, 5u, 9u}) {
            const auto r = art_solve(L, b[k], cfg);
            for (std::size_t s = 1; s < r.residual_history.size(); ++s) {
                CHECK(r.residual_history[s] <= r.residual_history[s - 1] * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("nonnegativity clamp does not move away from a nonnegative truth") {
    const Grid g(12);
    const auto L = build_system_matrix(g, make_standard_beams(g, 12));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> truth(g.pixel_count());
        for (double& v : truth) {
            v = u(rng) < 0.5 ? 0.0 : u(rng);
        }
        const auto b = L.multiply(truth);
        ArtConfig on;
        on.sweeps = 1;
        ArtConfig off = on;
        off.nonneg = false;
        const auto ra = art_solve(L, b, off);
        std::vector<double> clamped = ra.a;
        for (double& v : clamped) {
            v = std::max(v, 0.0);
        }
        CHECK(rel_err(clamped, truth) <= rel_err(ra.a, truth));
        CHECK(art_solve(L, b, on).a == clamped);
    }
}

TEST_CASE("per-line solves are independent of threading") {
    const Grid g(16);
    const auto L = build_system_matrix(g, make_standard_beams(g, 16));
    const auto t = LineTable::synthetic_default();
    const auto b = forward_project(L, t, phantom_two_gaussians(g));
    ArtConfig cfg;
    cfg.superiorize = ArtSuperiorization{};
    cfg.sweeps = 30;
    const auto s = solve_abs_coeffs(L, b, cfg, true);
    const auto m = solve_abs_coeffs(L, b, cfg, false);
    CHECK(s.a == m.a);
    const PerLine none;
    CHECK(solve_abs_coeffs(L, none, cfg).a.empty());
}

TEST_CASE("configuration and shape errors") {
    const auto L = dense_matrix({{1.0, 0.0}, {0.0, 1.0}});
    ArtConfig bad;
    bad.relaxation = 2.0;
    CHECK_THROWS_AS((void)art_solve(L, std::vector<double>{1.0, 1.0}, bad), ConfigError);
    bad = {};
    bad.sweeps = 0;
    CHECK_THROWS_AS((void)art_solve(L, std::vector<double>{1.0, 1.0}, bad), ConfigError);
    CHECK_THROWS_AS((void)art_solve(L, std::vector<double>{1.0}, ArtConfig{}), ShapeError);
    CHECK_THROWS_AS((void)art_solve(L, std::vector<double>{1.0, 1.0}, ArtConfig{}, std::vector<double>{1.0}),
                    ShapeError);
}
