#include "tas/superiorization.hpp"

#include "tas/errors.hpp"

#include <cmath>

namespace tas {

namespace {

void require_square(std::span<const double> z, std::size_t n, const char* what) {
    if (z.size() != n * n) {
        throw ShapeError(std::string(what) + ": field of length " + std::to_string(z.size()) +
                         " is not " + std::to_string(n) + "x" + std::to_string(n));
    }
}

// Forward differences with replicated edges: zero past the last row/column.
inline double diff_down(std::span<const double> z, std::size_t n, std::size_t i, std::size_t j) {
    return i + 1 < n ? z[i * n + j] - z[(i + 1) * n + j] : 0.0;
}
inline double diff_right(std::span<const double> z, std::size_t n, std::size_t i, std::size_t j) {
    return j + 1 < n ? z[i * n + j] - z[i * n + j + 1] : 0.0;
}

// r = c*Z - (mean of the 8-connected neighbours), c = 1 (standard) or 2 (as printed).
std::vector<double> tik_residual(std::span<const double> z, std::size_t n, double c) {
    std::vector<double> r(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            int count = 0;
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) {
                        continue;
                    }
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(n) ||
                        jj >= static_cast<std::ptrdiff_t>(n)) {
                        continue;
                    }
                    sum += z[static_cast<std::size_t>(ii) * n + static_cast<std::size_t>(jj)];
                    ++count;
                }
            }
            r[i * n + j] = c * z[i * n + j] - sum / count;
        }
    }
    return r;
}

double tik_scale(TikVariant v) { return v == TikVariant::standard ? 1.0 : 2.0; }

int neighbour_count(std::size_t n, std::size_t i, std::size_t j) {
    const int rows = (i > 0) + (i + 1 < n) + 1;
    const int cols = (j > 0) + (j + 1 < n) + 1;
    return rows * cols - 1;
}

} // namespace

double tv(std::span<const double> z, std::size_t n, double epsilon) {
    require_square(z, n, "tv");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = diff_down(z, n, i, j);
            const double dy = diff_right(z, n, i, j);
            total += std::sqrt(dx * dx + dy * dy + epsilon);
        }
    }
    return total;
}

std::vector<double> grad_tv(std::span<const double> z, std::size_t n, double epsilon) {
    require_square(z, n, "grad_tv");
    if (!(epsilon > 0.0)) {
        throw DomainError("grad_tv: the smoothing constant must be positive");
    }
    std::vector<double> g(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = diff_down(z, n, i, j);
            const double dy = diff_right(z, n, i, j);
            const double s = std::sqrt(dx * dx + dy * dy + epsilon);
            g[i * n + j] += (dx + dy) / s;
            if (i + 1 < n) {
                g[(i + 1) * n + j] -= dx / s;
            }
            if (j + 1 < n) {
                g[i * n + j + 1] -= dy / s;
            }
        }
    }
    return g;
}

double tik(std::span<const double> z, std::size_t n, TikVariant variant) {
    require_square(z, n, "tik");
    if (n < 2) {
        throw ShapeError("tik: the field needs at least 2x2 pixels");
    }
    double total = 0.0;
    for (const double r : tik_residual(z, n, tik_scale(variant))) {
        total += r * r;
    }
    return total;
}

std::vector<double> grad_tik(std::span<const double> z, std::size_t n, TikVariant variant) {
    require_square(z, n, "grad_tik");
    if (n < 2) {
        throw ShapeError("grad_tik: the field needs at least 2x2 pixels");
    }
    // psi = ||D z||^2 with D = c I - A, A the neighbour-mean operator;
    // grad = 2 D^T D z and (A^T r)_p = sum over neighbours q of p of r_q / rn_q.
    const double c = tik_scale(variant);
    const auto r = tik_residual(z, n, c);
    std::vector<double> g(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double back = 0.0;
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) {
                        continue;
                    }
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(n) ||
                        jj >= static_cast<std::ptrdiff_t>(n)) {
                        continue;
                    }
                    const auto qi = static_cast<std::size_t>(ii);
                    const auto qj = static_cast<std::size_t>(jj);
                    back += r[qi * n + qj] / neighbour_count(n, qi, qj);
                }
            }
            g[i * n + j] = 2.0 * (c * r[i * n + j] - back);
        }
    }
    return g;
}

double evaluate(const TargetFunction& phi, std::span<const double> z, std::size_t n) {
    return phi.kind == PriorKind::tv ? tv(z, n, phi.tv_epsilon) : tik(z, n, phi.tik_variant);
}

std::vector<double> gradient(const TargetFunction& phi, std::span<const double> z, std::size_t n) {
    return phi.kind == PriorKind::tv ? grad_tv(z, n, phi.tv_epsilon) : grad_tik(z, n, phi.tik_variant);
}

PerturbResult perturb(std::span<const double> z, std::size_t n, const TargetFunction& phi, double eta,
                      double gamma, std::size_t max_shrinks) {
    PerturbResult out;
    out.z.assign(z.begin(), z.end());
    out.eta = eta;
    out.phi_before = evaluate(phi, z, n);
    out.phi_after = out.phi_before;

    auto v = gradient(phi, z, n);
    double norm2 = 0.0;
    for (const double g : v) {
        norm2 += g * g;
    }
    const double norm = std::sqrt(norm2);
    if (norm < 1e-14) {
        return out;
    }
    for (double& g : v) {
        g = -g / norm;
    }

    std::vector<double> trial(z.size());
    const auto step = [&](double len) {
        for (std::size_t p = 0; p < z.size(); ++p) {
            trial[p] = z[p] + len * v[p];
        }
        return evaluate(phi, trial, n);
    };

    double phi_trial = step(out.eta);
    while (phi_trial > out.phi_before) {
        if (out.shrinks == max_shrinks) {
            return out;
        }
        out.eta *= gamma;
        ++out.shrinks;
        phi_trial = step(out.eta);
    }
    out.z = std::move(trial);
    out.phi_after = phi_trial;
    out.moved = true;
    return out;
}

void SupConfig::validate() const {
    dpa.validate();
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ConfigError("superiorization shrink factor must lie in (0, 1)");
    }
    if (!(eta_x0 > 0.0) || !(eta_y0 > 0.0)) {
        throw ConfigError("superiorization step lengths must be positive");
    }
}

SolverReport sup_dpa_run(const LineTable& table, const PerLine& a, const SupConfig& cfg,
                         const TargetFunction& phi, std::size_t n, std::span<const double> x0,
                         std::span<const double> y0) {
    cfg.validate();
    if (x0.size() != n * n) {
        throw ShapeError("sup_dpa_run: fields must be n*n long");
    }
    double eta_x = cfg.eta_x0;
    double eta_y = cfg.eta_y0;
    std::vector<PerturbationRecord> records;
    std::vector<double> phi_x;
    std::vector<double> phi_y;

    detail::PerturbHook hook;
    if (cfg.perturb_x || cfg.perturb_y) {
        hook = [&](std::size_t l, std::size_t q, char var, Field& z) {
            const bool is_x = var == 'x';
            if (is_x ? !cfg.perturb_x : !cfg.perturb_y) {
                return;
            }
            double& eta = is_x ? eta_x : eta_y;
            auto res = perturb(z, n, phi, eta, cfg.gamma, cfg.max_shrinks);
            eta = res.eta;
            records.push_back({l, q, var, res.phi_before, res.phi_after, res.eta, res.moved});
            if (res.moved) {
                z = std::move(res.z);
            }
        };
    }
    const detail::IterationHook on_iter = [&](const Field& x, const Field& y) {
        phi_x.push_back(evaluate(phi, x, n));
        phi_y.push_back(evaluate(phi, y, n));
    };

    auto rep = detail::run_descent_pairs(table, a, cfg.dpa, x0, y0, hook, on_iter);
    rep.perturbations = std::move(records);
    rep.phi_x_history = std::move(phi_x);
    rep.phi_y_history = std::move(phi_y);
    return rep;
}

} // namespace tas
