#include "tas/stage1.hpp"

#include "tas/errors.hpp"
#include "tas/superiorization.hpp"

#include <cmath>
#include <future>

namespace tas {

void ArtConfig::validate() const {
    if (!(relaxation > 0.0 && relaxation < 2.0)) {
        throw ConfigError("ART relaxation must lie in (0, 2)");
    }
    if (sweeps < 1) {
        throw ConfigError("ART needs at least one sweep");
    }
    if (superiorize && !(superiorize->gamma > 0.0 && superiorize->gamma < 1.0)) {
        throw ConfigError("ART superiorization shrink factor must lie in (0, 1)");
    }
}

void kaczmarz_step(const SystemMatrix& L, std::size_t row, double b_i, std::span<double> a,
                   double relaxation) {
    const double norm2 = L.row_norm2(row);
    if (norm2 <= 0.0) {
        return;
    }
    const double scale = relaxation * (b_i - L.row_dot(row, a)) / norm2;
    const auto idx = L.row_indices(row);
    const auto val = L.row_values(row);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        a[idx[p]] += scale * val[p];
    }
}

namespace {

double residual_norm(const SystemMatrix& L, std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < L.rows(); ++i) {
        const double r = L.row_dot(i, a) - b[i];
        sq += r * r;
    }
    return std::sqrt(sq);
}

} // namespace

ArtResult art_solve(const SystemMatrix& L, std::span<const double> b, const ArtConfig& cfg,
                    std::span<const double> start) {
    cfg.validate();
    if (b.size() != L.rows()) {
        throw ShapeError("art_solve: sinogram length differs from the number of beams");
    }
    if (!start.empty() && start.size() != L.cols()) {
        throw ShapeError("art_solve: start vector length differs from the number of pixels");
    }
    ArtResult res;
    res.a = start.empty() ? std::vector<double>(L.cols(), 0.0)
                          : std::vector<double>(start.begin(), start.end());

    double bnorm = 0.0;
    for (const double v : b) {
        bnorm += v * v;
    }
    bnorm = std::sqrt(bnorm);
    const double tol = cfg.residual_tol * bnorm;

    if (residual_norm(L, res.a, b) <= tol) {
        res.converged = true;
        return res;
    }

    const std::size_t n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(L.cols()))));
    std::optional<TargetFunction> phi;
    double eta = 0.0;
    if (cfg.superiorize) {
        if (n * n != L.cols()) {
            throw ShapeError("art_solve: superiorization needs a square pixel grid");
        }
        phi = TargetFunction{PriorKind::tv, cfg.superiorize->tv_epsilon, TikVariant::standard};
        eta = cfg.superiorize->eta0;
        if (eta <= 0.0) {
            // Mean coefficient of the uniform field that reproduces the total absorbance.
            double bsum = 0.0;
            double lsum = 0.0;
            for (std::size_t i = 0; i < L.rows(); ++i) {
                bsum += b[i];
                lsum += L.row_sum(i);
            }
            eta = lsum > 0.0 ? 5.0 * std::abs(bsum / lsum) * std::sqrt(static_cast<double>(L.cols())) : 0.0;
        }
    }

    for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
        if (phi && eta > 0.0) {
            auto pr = perturb(res.a, n, *phi, eta, cfg.superiorize->gamma, cfg.superiorize->max_shrinks);
            eta = pr.eta;
            if (pr.moved) {
                res.a = std::move(pr.z);
            }
        }
        for (std::size_t i = 0; i < L.rows(); ++i) {
            kaczmarz_step(L, i, b[i], res.a, cfg.relaxation);
        }
        if (cfg.nonneg) {
            for (double& v : res.a) {
                v = v < 0.0 ? 0.0 : v;
            }
        }
        const double r = residual_norm(L, res.a, b);
        res.residual_history.push_back(r);
        res.sweeps = sweep + 1;
        if (r <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

Stage1Result solve_abs_coeffs(const SystemMatrix& L, const PerLine& b, const ArtConfig& cfg,
                              bool single_thread) {
    cfg.validate();
    Stage1Result out;
    out.details.resize(b.size());
    if (single_thread) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            out.details[k] = art_solve(L, b[k], cfg);
        }
    } else {
        std::vector<std::future<ArtResult>> jobs;
        jobs.reserve(b.size());
        for (const auto& bk : b) {
            jobs.push_back(std::async(std::launch::async, [&L, &bk, &cfg] { return art_solve(L, bk, cfg); }));
        }
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            out.details[k] = jobs[k].get();
        }
    }
    out.a.reserve(b.size());
    for (const auto& d : out.details) {
        out.a.push_back(d.a);
    }
    return out;
}

} // namespace tas
