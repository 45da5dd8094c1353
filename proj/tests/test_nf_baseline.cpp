#include "oracles.hpp"

#include "tas/errors.hpp"
#include "tas/nf_baseline.hpp"
#include "tas/phantoms.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tas;

namespace {

double model_value(const Vec2& g, const Sym2& h, double s0, double s1) {
    return g[0] * s0 + g[1] * s1 + 0.5 * (h.xx * s0 * s0 + 2.0 * h.xy * s0 * s1 + h.yy * s1 * s1);
}

// Minimum of the quadratic model on the circle ||s|| = delta: dense angle
// grid followed by ternary refinement around the best sample.
double boundary_minimum(const Vec2& g, const Sym2& h, double delta) {
    const int samples = 20000;
    const double step = 2.0 * std::numbers::pi / samples;
    const auto f = [&](double th) { return model_value(g, h, delta * std::cos(th), delta * std::sin(th)); };
    int best = 0;
    for (int i = 1; i < samples; ++i) {
        if (f(i * step) < f(best * step)) {
            best = i;
        }
    }
    double lo = (best - 1) * step;
    double hi = (best + 1) * step;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    return f(0.5 * (lo + hi));
}

Sym2 random_sym(std::mt19937_64& rng, double lmin, double lmax) {
    std::uniform_real_distribution<double> ul(lmin, lmax);
    std::uniform_real_distribution<double> ua(0.0, std::numbers::pi);
    const double l1 = ul(rng);
    const double l2 = ul(rng);
    const double a = ua(rng);
    const double c = std::cos(a);
    const double s = std::sin(a);
    return {l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
}

// Residuals linear in (x, y): the Gauss-Newton model is exact.
struct LinearModel {
    std::vector<double> a;
    std::vector<double> cx;
    std::vector<double> cy;
    PixelModel evaluate(double x, double y) const {
        PixelModel m;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double r = a[k] - cx[k] * x - cy[k] * y;
            m.value += r * r;
            m.g[0] += -2.0 * r * cx[k];
            m.g[1] += -2.0 * r * cy[k];
            m.h.xx += 2.0 * cx[k] * cx[k];
            m.h.xy += 2.0 * cx[k] * cy[k];
            m.h.yy += 2.0 * cy[k] * cy[k];
        }
        return m;
    }
};

} // namespace

TEST_CASE("pixel objective") {
    const auto t = LineTable::synthetic_default();
    const Phantom truth{{1450.0}, {0.08}};
    const auto a = true_abs_coeffs(t, truth);
    std::vector<double> aj;
    for (const auto& ak : a) {
        aj.push_back(ak[0]);
    }
    const auto at = pixel_objective(t, aj, 1450.0, 0.08);
    CHECK(at.value == 0.0);
    CHECK(at.g[0] == 0.0);
    CHECK(at.g[1] == 0.0);

    double sq = 0.0;
    for (double v : aj) {
        sq += v * v;
    }
    const auto z1 = pixel_objective(t, aj, 900.0, 0.0);
    const auto z2 = pixel_objective(t, aj, 2000.0, 0.0);
    CHECK(z1.value == doctest::Approx(sq).epsilon(1e-15));
    CHECK(z2.value == doctest::Approx(sq).epsilon(1e-15));
    CHECK(z1.g[1] != z2.g[1]);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ux(500, 2300);
    std::uniform_real_distribution<double> uy(0.01, 0.3);
    for (int trial = 0; trial < 100; ++trial) {
        const oracle::Vec p{ux(rng), uy(rng)};
        const auto f = [&](const oracle::Vec& z) {
            long double s = 0.0L;
            for (std::size_t k = 0; k < t.size(); ++k) {
                const auto& l = t.line(k);
                const long double r = aj[k] - oracle::btilde(l.s, l.e, t.t0(), z[0]) * z[1];
                s += r * r;
            }
            return static_cast<double>(s);
        };
        const auto m = pixel_objective(t, aj, p[0], p[1]);
        CHECK(oracle::rel_diff({m.g[0], m.g[1]}, oracle::central_gradient(f, p)) < 1e-6);
        CHECK(m.h.xx >= 0.0);
        CHECK(m.h.xx * m.h.yy - m.h.xy * m.h.xy >= -1e-12 * m.h.xx * m.h.yy);
    }
    CHECK_THROWS_AS((void)pixel_objective(t, aj, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS((void)pixel_objective(t, std::vector<double>{1.0}, 1000.0, 0.1), ShapeError);
}

TEST_CASE("trust-region subproblem closed forms") {
    const Sym2 id{1.0, 0.0, 1.0};
    const Vec2 zero = tr_subproblem({0.0, 0.0}, {2.0, 0.5, 1.0}, 1.0);
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);
    const Vec2 s = tr_subproblem({0.3, -0.4}, id, 1.0);
    CHECK(s[0] == doctest::Approx(-0.3));
    CHECK(s[1] == doctest::Approx(0.4));
    const Vec2 c = tr_subproblem({3.0, -4.0}, id, 1.0);
    CHECK(c[0] == doctest::Approx(-0.6));
    CHECK(c[1] == doctest::Approx(0.8));
    // negative curvature at a stationary point
    const Vec2 neg = tr_subproblem({0.0, 0.0}, {1.0, 0.0, -1.0}, 2.0);
    CHECK(std::abs(neg[1]) == doctest::Approx(2.0));
    // hard case: gradient orthogonal to the negative-curvature direction
    const Vec2 hard = tr_subproblem({0.5, 0.0}, {1.0, 0.0, -1.0}, 3.0);
    CHECK(std::hypot(hard[0], hard[1]) == doctest::Approx(3.0));
    CHECK(hard[0] == doctest::Approx(-0.25));
    CHECK(model_value({0.5, 0.0}, {1.0, 0.0, -1.0}, hard[0], hard[1]) ==
          doctest::Approx(boundary_minimum({0.5, 0.0}, {1.0, 0.0, -1.0}, 3.0)).epsilon(1e-10));
}

TEST_CASE("trust-region subproblem against a boundary grid search") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ug(-3.0, 3.0);
    std::uniform_real_distribution<double> ud(0.05, 2.0);
    int active = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Sym2 h = trial % 3 == 0 ? random_sym(rng, -2.0, 2.0) : random_sym(rng, 0.05, 5.0);
        const Vec2 g{ug(rng), ug(rng)};
        const double delta = ud(rng);
        const Vec2 s = tr_subproblem(g, h, delta);
        const double ns = std::hypot(s[0], s[1]);
        const double ms = model_value(g, h, s[0], s[1]);
        CHECK(ns <= delta * (1.0 + 1e-12));
        CHECK(ms <= 0.0);
        const double det = h.xx * h.yy - h.xy * h.xy;
        const bool pd = h.xx > 0.0 && det > 0.0;
        if (pd) {
            const Vec2 newton{-(h.yy * g[0] - h.xy * g[1]) / det, -(h.xx * g[1] - h.xy * g[0]) / det};
            if (std::hypot(newton[0], newton[1]) <= delta) {
                CHECK(s[0] == doctest::Approx(newton[0]).epsilon(1e-10));
                CHECK(s[1] == doctest::Approx(newton[1]).epsilon(1e-10));
                continue;
            }
        }
        ++active;
        CHECK(ms <= boundary_minimum(g, h, delta) + 1e-8);
        CHECK(ns == doctest::Approx(delta).epsilon(1e-10));
    }
    CHECK(active > 100);
}

TEST_CASE("pixel fit") {
    const auto t = LineTable::synthetic_default();
    TrustRegionConfig cfg;
    cfg.record_history = true;
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> ux(850, 2350);
    std::uniform_real_distribution<double> uy(0.01, 0.25);
    for (int trial = 0; trial < 100; ++trial) {
        const double xs = ux(rng);
        const double ys = uy(rng);
        std::vector<double> aj;
        for (const auto& l : t.lines()) {
            aj.push_back(beta_tilde_scalar(l, t.t0(), xs) * ys);
        }
        if (trial == 0) {
            const auto at = nf_fit_pixel(t, aj, xs, ys, cfg);
            CHECK(at.iterations == 0);
            CHECK(at.stop == FitStop::function_tol);
        }
        const auto fit = nf_fit_pixel(t, aj, ux(rng), uy(rng), cfg);
        CHECK(fit.x == doctest::Approx(xs).epsilon(1e-4));
        CHECK(fit.y == doctest::Approx(ys).epsilon(1e-4));
        for (std::size_t i = 1; i < fit.objective_history.size(); ++i) {
            CHECK(fit.objective_history[i] < fit.objective_history[i - 1]);
        }
        CHECK(fit.accepted + 1 == fit.objective_history.size());
    }
}

TEST_CASE("linear residuals converge in a few iterations") {
    LinearModel m{{1.0, 2.0, 0.5}, {0.001, 0.002, -0.001}, {1.0, 0.5, 2.0}};
    TrustRegionConfig cfg;
    cfg.x_bounds = {1.0, 1e5};
    cfg.y_bounds = {-10.0, 10.0};
    const auto fit = trust_region_fit(m, 1000.0, 0.3, cfg);
    CHECK(fit.iterations <= 3);
    const auto at = m.evaluate(fit.x, fit.y);
    CHECK(std::hypot(at.g[0] * fit.x, at.g[1]) < 1e-8);
}

TEST_CASE("field fit") {
    const auto t = LineTable::synthetic_default();
    const Grid g(10);
    auto ph = phantom_two_gaussians(g);
    for (std::size_t j = 0; j < 10; ++j) {
        ph.y_true[j] = 0.0;
    }
    const auto a = true_abs_coeffs(t, ph);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(800, 2400);
    std::uniform_real_distribution<double> uy(0.005, 0.2);
    Field x0(g.pixel_count());
    Field y0(g.pixel_count());
    for (std::size_t j = 0; j < x0.size(); ++j) {
        x0[j] = ux(rng);
        y0[j] = uy(rng);
    }
    const TrustRegionConfig cfg;
    const auto fit = nf_fit_field(t, a, x0, y0, cfg);
    CHECK(fit.wall_time > 0.0);
    for (std::size_t j = 0; j < x0.size(); ++j) {
        CHECK_FALSE(fit.failed[j]);
        if (j < 10) {
            CHECK(std::abs(fit.y[j]) < 1e-12);
        } else {
            CHECK(fit.x[j] == doctest::Approx(ph.x_true[j]).epsilon(1e-4));
            CHECK(fit.y[j] == doctest::Approx(ph.y_true[j]).epsilon(1e-4));
        }
    }
    const auto again = nf_fit_field(t, a, x0, y0, cfg);
    CHECK(again.x == fit.x);
    CHECK(again.y == fit.y);
    CHECK_THROWS_AS((void)nf_fit_field(t, a, x0, Field(3), cfg), ShapeError);
    TrustRegionConfig bad;
    bad.contract = 1.5;
    CHECK_THROWS_AS((void)nf_fit_field(t, a, x0, y0, bad), ConfigError);
}
