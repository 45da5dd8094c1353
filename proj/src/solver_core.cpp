#include "tas/solver_core.hpp"

#include "tas/errors.hpp"

#include <chrono>
#include <cmath>

namespace tas {

std::vector<Vector> csa_iterate(std::span<const Operator> ops, std::span<const double> x0,
                                const Relaxation& lambda, std::size_t max_sweeps, bool every_step) {
    if (ops.empty()) {
        throw ConfigError("csa_iterate needs at least one operator");
    }
    const std::size_t w = ops.size();
    std::vector<Vector> traj;
    traj.reserve(1 + (every_step ? max_sweeps * w : max_sweeps));
    Vector x(x0.begin(), x0.end());
    traj.push_back(x);
    for (std::size_t l = 0; l < max_sweeps * w; ++l) {
        const Vector tx = ops[l % w](x);
        if (tx.size() != x.size()) {
            throw ShapeError("csa_iterate: operator changed the vector length");
        }
        const double lam = lambda(l);
        for (std::size_t j = 0; j < x.size(); ++j) {
            x[j] += lam * (tx[j] - x[j]);
        }
        if (every_step || (l + 1) % w == 0) {
            traj.push_back(x);
        }
    }
    return traj;
}

void alternating_cfp_step(const LineTable& table, const PerLine& a, Field& x, Field& y, double lambda,
                          std::size_t l) {
    if (a.size() != table.size()) {
        throw ShapeError("alternating_cfp_step: one coefficient vector per line is required");
    }
    const std::size_t i = l % table.size();
    if (a[i].size() != x.size()) {
        throw ShapeError("alternating_cfp_step: coefficient length differs from field length");
    }
    const Field b = beta(table, i, x, y);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double r = a[i][j] - b[j];
        x[j] += lambda * r;
        y[j] += lambda * r;
    }
}

void DpaConfig::validate() const {
    if (!(lambda_x > 0.0) || !(lambda_y > 0.0)) {
        throw ConfigError("DPA step sizes must be positive");
    }
    if (max_iter < 1) {
        throw ConfigError("DPA needs at least one outer iteration");
    }
    if (!(x_bounds.lo > 0.0) || !(x_bounds.hi >= x_bounds.lo)) {
        throw ConfigError("temperature bounds must be a nonempty interval of positive values");
    }
    if (clamp_y && !(y_bounds.hi >= y_bounds.lo)) {
        throw ConfigError("concentration bounds must be a nonempty interval");
    }
    if (!(a_floor > 0.0)) {
        throw ConfigError("reference coefficient floor must be positive");
    }
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
    case Termination::residual:
        return "residual";
    case Termination::max_iter:
        return "max_iter";
    }
    return "unknown";
}

double residual(const LineTable& table, const PerLine& a, std::span<const double> x,
                std::span<const double> y) {
    if (a.size() != table.size()) {
        throw ShapeError("residual: one coefficient vector per line is required");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const Field b = beta(table, k, x, y);
        if (a[k].size() != b.size()) {
            throw ShapeError("residual: coefficient length differs from field length");
        }
        double sq = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double r = a[k][j] - b[j];
            sq += r * r;
        }
        total += std::sqrt(sq);
    }
    return total;
}

SolverReport dpa_run(const LineTable& table, const PerLine& a, const DpaConfig& cfg,
                     std::span<const double> x0, std::span<const double> y0) {
    return detail::run_descent_pairs(table, a, cfg, x0, y0, {}, {});
}

namespace detail {

SolverReport run_descent_pairs(const LineTable& table, const PerLine& a, const DpaConfig& cfg,
                               std::span<const double> x0, std::span<const double> y0,
                               const PerturbHook& perturb, const IterationHook& on_iteration) {
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();

    const std::size_t w = table.size();
    const std::size_t m = x0.size();
    const std::size_t t = table.reference();
    if (a.size() != w) {
        throw ShapeError("descent pairs: expected " + std::to_string(w) + " coefficient vectors, got " +
                         std::to_string(a.size()));
    }
    if (y0.size() != m) {
        throw ShapeError("descent pairs: x0 and y0 differ in length");
    }
    for (const auto& ak : a) {
        if (ak.size() != m) {
            throw ShapeError("descent pairs: coefficient length differs from field length");
        }
    }

    // Targets of the ratio system, u^q = diag(a^t)^-1 a^q.
    std::vector<double> ref(m);
    bool any_above_floor = false;
    for (std::size_t j = 0; j < m; ++j) {
        any_above_floor = any_above_floor || a[t][j] > cfg.a_floor;
        ref[j] = a[t][j] > cfg.a_floor ? a[t][j] : cfg.a_floor;
    }
    if (m > 0 && !any_above_floor) {
        throw UnsolvableReferenceError("every reference-line coefficient is below the floor");
    }
    PerLine u(w);
    for (std::size_t q = 0; q < w; ++q) {
        if (q == t) {
            continue;
        }
        u[q].resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            u[q][j] = a[q][j] / ref[j];
        }
    }

    SolverReport rep;
    Field x(x0.begin(), x0.end());
    Field y(y0.begin(), y0.end());
    for (double& xj : x) {
        if (!(xj > 0.0)) {
            throw DomainError("descent pairs: initial temperature must be positive");
        }
        xj = cfg.x_bounds.clamp(xj);
    }
    if (cfg.clamp_y) {
        for (double& yj : y) {
            yj = cfg.y_bounds.clamp(yj);
        }
    }

    const auto& lines = table.lines();
    const double t0 = table.t0();
    std::vector<std::vector<double>> bt(w, std::vector<double>(m));

    // beta-tilde of every line at the current x; reused by the y sweep and
    // by the residual.
    const auto refresh_bt = [&] {
        for (std::size_t k = 0; k < w; ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                bt[k][j] = beta_tilde_scalar(lines[k], t0, x[j]);
            }
        }
    };
    const auto current_residual = [&] {
        double total = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            double sq = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double r = a[k][j] - bt[k][j] * y[j];
                sq += r * r;
            }
            total += std::sqrt(sq);
        }
        return total;
    };

    refresh_bt();
    rep.initial_residual = current_residual();
    bool done = rep.initial_residual < cfg.residual_tol;
    if (done) {
        rep.terminated_by = Termination::residual;
    }

    for (std::size_t l = 0; !done && l < cfg.max_iter; ++l) {
        for (std::size_t q = 0; q < w; ++q) {
            if (perturb) {
                perturb(l, q, 'x', x);
            }
            if (q == t) {
                // u^t = f_t = 1: the step is identically zero, only the projection remains.
                if (perturb) {
                    for (double& xj : x) {
                        xj = cfg.x_bounds.clamp(xj);
                    }
                }
                continue;
            }
            const auto& uq = u[q];
            for (std::size_t j = 0; j < m; ++j) {
                const double f = ratio_scalar(lines[q], lines[t], t0, x[j]);
                x[j] = cfg.x_bounds.clamp(x[j] + cfg.lambda_x * (uq[j] - f));
            }
        }

        refresh_bt();
        for (std::size_t q = 0; q < w; ++q) {
            if (perturb) {
                perturb(l, q, 'y', y);
            }
            const auto& aq = a[q];
            const auto& bq = bt[q];
            for (std::size_t j = 0; j < m; ++j) {
                double yj = y[j] + cfg.lambda_y * (aq[j] - bq[j] * y[j]);
                y[j] = cfg.clamp_y ? cfg.y_bounds.clamp(yj) : yj;
            }
        }

        const double res = current_residual();
        rep.residual_history.push_back(res);
        rep.iterations = l + 1;
        if (on_iteration) {
            on_iteration(x, y);
        }
        if (res < cfg.residual_tol) {
            rep.terminated_by = Termination::residual;
            done = true;
        }
    }

    rep.x_final = std::move(x);
    rep.y_final = std::move(y);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace detail

} // namespace tas
