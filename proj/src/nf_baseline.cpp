#include "tas/nf_baseline.hpp"

#include "tas/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tas {

namespace {

// Maximum number of lines handled on the stack by the spectroscopic model.
constexpr std::size_t kMaxLines = 64;

struct SpectroscopicModel {
    const LineTable& table;
    std::span<const double> a;

    PixelModel evaluate(double x, double y) const { return pixel_objective(table, a, x, y); }
};

} // namespace

PixelModel pixel_objective(const LineTable& table, std::span<const double> a_j, double x, double y) {
    if (!(x > 0.0)) {
        throw DomainError("pixel_objective: temperature must be positive");
    }
    if (a_j.size() != table.size()) {
        throw ShapeError("pixel_objective: one coefficient per line is required");
    }
    PixelModel out;
    double jxx = 0.0;
    double jxy = 0.0;
    double jyy = 0.0;
    const double inv_x2 = 1.0 / (x * x);
    for (std::size_t k = 0; k < a_j.size(); ++k) {
        const auto& line = table.lines()[k];
        const double bt = beta_tilde_scalar(line, table.t0(), x);
        const double r = a_j[k] - bt * y;
        // Jacobian of the residual r_k = a_k - btilde_k(x) y.
        const double dx = -bt * line.e * inv_x2 * y;
        const double dy = -bt;
        out.value += r * r;
        out.g[0] += 2.0 * r * dx;
        out.g[1] += 2.0 * r * dy;
        jxx += dx * dx;
        jxy += dx * dy;
        jyy += dy * dy;
    }
    out.h = {2.0 * jxx, 2.0 * jxy, 2.0 * jyy};
    return out;
}

Vec2 tr_subproblem(const Vec2& g, const Sym2& h, double delta) {
    // Eigen-decomposition H = l1 q1 q1^T + l2 q2 q2^T with l1 <= l2.
    const double mean = 0.5 * (h.xx + h.yy);
    const double rad = std::hypot(0.5 * (h.xx - h.yy), h.xy);
    double l2 = mean + rad;
    double l1 = mean - rad;
    if (l2 > 0.0 && l1 > 0.0) {
        l1 = (h.xx * h.yy - h.xy * h.xy) / l2; // avoids cancellation in mean - rad
    }
    Vec2 q2{1.0, 0.0};
    if (h.xy != 0.0) {
        const Vec2 va{h.xy, l2 - h.xx};
        const Vec2 vb{l2 - h.yy, h.xy};
        const Vec2& v = std::hypot(va[0], va[1]) >= std::hypot(vb[0], vb[1]) ? va : vb;
        const double nv = std::hypot(v[0], v[1]);
        q2 = {v[0] / nv, v[1] / nv};
    } else if (h.yy > h.xx) {
        q2 = {0.0, 1.0};
    }
    const Vec2 q1{-q2[1], q2[0]};
    const double g1 = q1[0] * g[0] + q1[1] * g[1];
    const double g2 = q2[0] * g[0] + q2[1] * g[1];

    const auto step = [&](double mu) {
        const double c1 = l1 + mu > 0.0 ? -g1 / (l1 + mu) : 0.0;
        const double c2 = l2 + mu > 0.0 ? -g2 / (l2 + mu) : 0.0;
        return Vec2{c1 * q1[0] + c2 * q2[0], c1 * q1[1] + c2 * q2[1]};
    };
    const auto norm = [](const Vec2& v) { return std::hypot(v[0], v[1]); };

    if (g1 == 0.0 && g2 == 0.0) {
        // Stationary point: move along negative curvature if there is any.
        if (l1 < 0.0) {
            return {delta * q1[0], delta * q1[1]};
        }
        return {0.0, 0.0};
    }

    if (l1 > 0.0) {
        const Vec2 s = step(0.0);
        if (norm(s) <= delta) {
            return s;
        }
    }

    const double mu_lo = std::max(0.0, -l1);
    // Hard case: no gradient along the lowest eigenvector, so the multiplier
    // may sit exactly at -l1.
    if (g1 == 0.0 && l1 <= 0.0) {
        const Vec2 s = step(mu_lo);
        const double ns = norm(s);
        if (ns <= delta) {
            if (l1 == 0.0) {
                return s;
            }
            const double tau = std::sqrt(std::max(0.0, delta * delta - ns * ns));
            return {s[0] + tau * q1[0], s[1] + tau * q1[1]};
        }
    }

    // Secular equation 1/||s(mu)|| = 1/delta on (mu_lo, mu_hi], safeguarded Newton.
    const double gnorm = std::hypot(g1, g2);
    double lo = mu_lo;
    double hi = std::max(mu_lo, gnorm / delta - l1) + gnorm / delta;
    double mu = hi;
    for (int it = 0; it < 200; ++it) {
        const double d1 = l1 + mu;
        const double d2 = l2 + mu;
        const double s2 = (d1 > 0.0 ? g1 * g1 / (d1 * d1) : 0.0) + g2 * g2 / (d2 * d2);
        const double ns = std::sqrt(s2);
        if (std::abs(ns - delta) <= 1e-14 * delta) {
            break;
        }
        if (ns > delta) {
            lo = mu;
        } else {
            hi = mu;
        }
        const double ds2 = -2.0 * ((d1 > 0.0 ? g1 * g1 / (d1 * d1 * d1) : 0.0) + g2 * g2 / (d2 * d2 * d2));
        // psi(mu) = 1/||s|| - 1/delta, psi' = -0.5 s2^{-3/2} ds2
        const double psi = 1.0 / ns - 1.0 / delta;
        const double dpsi = -0.5 * ds2 / (s2 * ns);
        double next = dpsi > 0.0 ? mu - psi / dpsi : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (next == mu) {
            break;
        }
        mu = next;
    }
    Vec2 s = step(mu);
    const double ns = norm(s);
    if (ns > delta) {
        s = {s[0] * delta / ns, s[1] * delta / ns};
    }
    return s;
}

void TrustRegionConfig::validate() const {
    if (!(delta_min > 0.0) || !(initial_radius() > delta_min)) {
        throw ConfigError("trust region needs delta0 > delta_min > 0");
    }
    if (!(expand >= 1.0) || !(contract > 0.0 && contract < 1.0)) {
        throw ConfigError("trust region expand must be >= 1 and contract in (0, 1)");
    }
    if (!(x_bounds.lo > 0.0) || x_bounds.hi < x_bounds.lo || y_bounds.hi < y_bounds.lo) {
        throw ConfigError("trust region bounds must be nonempty with positive temperatures");
    }
}

std::string_view to_string(FitStop s) noexcept {
    switch (s) {
    case FitStop::function_tol:
        return "function_tol";
    case FitStop::radius:
        return "radius";
    case FitStop::max_iter:
        return "max_iter";
    }
    return "unknown";
}

PixelFit nf_fit_pixel(const LineTable& table, std::span<const double> a_j, double x0_j, double y0_j,
                      const TrustRegionConfig& cfg) {
    cfg.validate();
    return trust_region_fit(SpectroscopicModel{table, a_j}, x0_j, y0_j, cfg);
}

FieldFit nf_fit_field(const LineTable& table, const PerLine& a, std::span<const double> x0,
                      std::span<const double> y0, const TrustRegionConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();
    const std::size_t w = table.size();
    const std::size_t m = x0.size();
    if (a.size() != w || y0.size() != m) {
        throw ShapeError("nf_fit_field: inconsistent coefficient or start sizes");
    }
    for (const auto& ak : a) {
        if (ak.size() != m) {
            throw ShapeError("nf_fit_field: coefficient length differs from field length");
        }
    }
    if (w > kMaxLines) {
        throw ShapeError("nf_fit_field: too many lines");
    }
    FieldFit out{Field(m), Field(m), std::vector<std::size_t>(m), std::vector<bool>(m, false), 0.0};
    std::array<double, kMaxLines> aj{};
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < w; ++k) {
            aj[k] = a[k][j];
        }
        try {
            const auto fit = trust_region_fit(SpectroscopicModel{table, std::span(aj.data(), w)}, x0[j],
                                              y0[j], cfg);
            out.x[j] = fit.x;
            out.y[j] = fit.y;
            out.iterations[j] = fit.iterations;
        } catch (const DomainError&) {
            out.x[j] = x0[j];
            out.y[j] = y0[j];
            out.failed[j] = true;
        }
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace tas
