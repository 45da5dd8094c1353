#include "tas/spectroscopy.hpp"

#include "tas/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tas {

namespace {

void require_positive(std::span<const double> x, const char* what) {
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] > 0.0) || !std::isfinite(x[j])) {
            throw DomainError(std::string(what) + ": component " + std::to_string(j) +
                              " is not a positive finite temperature");
        }
    }
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
    }
}

} // namespace

LineTable::LineTable(std::vector<SpectralLine> lines, double t0)
    : lines_(std::move(lines)), t0_(t0), t_ref_(0) {
    if (lines_.size() < 2) {
        throw ConfigError("line table needs at least two lines");
    }
    if (!(t0_ > 0.0) || !std::isfinite(t0_)) {
        throw ConfigError("reference temperature t0 must be positive");
    }
    for (const auto& l : lines_) {
        if (!(l.s > 0.0) || !std::isfinite(l.s)) {
            throw ConfigError("line strengths must be positive and finite");
        }
        if (!std::isfinite(l.e)) {
            throw ConfigError("lower-state energies must be finite");
        }
    }
    t_ref_ = select_reference_index(lines_);
}

LineTable LineTable::synthetic_default() {
    // S_k = 0.3 * w_k * exp(-E_k (1/296 - 1/2600)), w_k linear from 1 to 0.6,
    // rounded to six significant digits.
    static constexpr double kStrength[] = {0.3,        0.0641638,   0.0136936,   0.00291549,
                                           0.0006191,  0.000131081, 2.76629e-05, 5.81646e-06,
                                           1.21789e-06, 2.53797e-07};
    std::vector<SpectralLine> lines;
    lines.reserve(std::size(kStrength));
    for (std::size_t k = 0; k < std::size(kStrength); ++k) {
        lines.push_back({kStrength[k], 500.0 * static_cast<double>(k)});
    }
    return LineTable(std::move(lines), 296.0);
}

LineTable LineTable::parse(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError(std::string("line table: ") + err.what());
    }
    if (!doc.contains("s") || !doc.contains("e") || !doc.contains("t0")) {
        throw ConfigError("line table: fields s, e and t0 are required");
    }
    const auto s = doc.at("s").get<std::vector<double>>();
    const auto e = doc.at("e").get<std::vector<double>>();
    if (s.size() != e.size()) {
        throw ConfigError("line table: s and e must have the same length");
    }
    std::vector<SpectralLine> lines(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        lines[k] = {s[k], e[k]};
    }
    return LineTable(std::move(lines), doc.at("t0").get<double>());
}

LineTable LineTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open line table " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string LineTable::to_json() const {
    nlohmann::json doc;
    doc["t0"] = t0_;
    auto& s = doc["s"] = nlohmann::json::array();
    auto& e = doc["e"] = nlohmann::json::array();
    for (const auto& l : lines_) {
        s.push_back(l.s);
        e.push_back(l.e);
    }
    return doc.dump(2);
}

const SpectralLine& LineTable::line(std::size_t k) const {
    if (k >= lines_.size()) {
        throw IndexError("wavelength index " + std::to_string(k) + " out of range");
    }
    return lines_[k];
}

std::size_t select_reference_index(std::span<const SpectralLine> lines) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].e < lines[best].e) {
            best = k;
        }
    }
    return best;
}

double beta_tilde_scalar(const SpectralLine& line, double t0, double x) noexcept {
    return line.s * std::exp(-line.e * (1.0 / x - 1.0 / t0));
}

double ratio_scalar(const SpectralLine& line, const SpectralLine& ref, double t0,
                    double x) noexcept {
    return (line.s / ref.s) * std::exp(-(line.e - ref.e) * (1.0 / x - 1.0 / t0));
}

Field beta_tilde(const LineTable& table, std::size_t k, std::span<const double> x) {
    const auto& l = table.line(k);
    require_positive(x, "beta_tilde");
    Field out(x.size());
    std::transform(x.begin(), x.end(), out.begin(),
                   [&](double xj) { return beta_tilde_scalar(l, table.t0(), xj); });
    return out;
}

Field beta(const LineTable& table, std::size_t k, std::span<const double> x,
           std::span<const double> y) {
    require_same_length(x.size(), y.size(), "beta");
    Field out = beta_tilde(table, k, x);
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] *= y[j];
    }
    return out;
}

Field ratio_f(const LineTable& table, std::size_t k, std::span<const double> x) {
    const auto& l = table.line(k);
    const auto& ref = table.line(table.reference());
    require_positive(x, "ratio_f");
    Field out(x.size());
    std::transform(x.begin(), x.end(), out.begin(),
                   [&](double xj) { return ratio_scalar(l, ref, table.t0(), xj); });
    return out;
}

Field grad_g(const LineTable& table, std::size_t k, std::span<const double> x,
             std::span<const double> target) {
    require_same_length(x.size(), target.size(), "grad_g");
    const double de = table.line(k).e - table.line(table.reference()).e;
    Field out = ratio_f(table, k, x);
    // d f_j / d x_j = de * f_j / x_j^2, and grad_j = (f_j - u_j) * df_j/dx_j.
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double f = out[j];
        out[j] = (f - target[j]) * de * f / (x[j] * x[j]);
    }
    return out;
}

Field grad_h(const LineTable& table, std::size_t k, std::span<const double> x_fixed,
             std::span<const double> y, std::span<const double> target) {
    require_same_length(x_fixed.size(), y.size(), "grad_h");
    require_same_length(y.size(), target.size(), "grad_h");
    Field out = beta_tilde(table, k, x_fixed);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double bt = out[j];
        out[j] = -bt * (target[j] - bt * y[j]);
    }
    return out;
}

} // namespace tas
