#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cjlab/errors.hpp"
#include "cjlab/padic.hpp"

namespace cjlab {

/// Comparison tolerance for unit-interval values.
inline constexpr double kUnitTolerance = 1e-12;
/// One-sided slack granted to every certificate inequality.
inline constexpr double kCertificateSlack = 1e-9;

enum class SettingKind { Classical, NonArchimedean, Random, Fuzzy };

inline std::string_view to_string(SettingKind k) {
    switch (k) {
        case SettingKind::Classical: return "classical";
        case SettingKind::NonArchimedean: return "nonarchimedean";
        case SettingKind::Random: return "random";
        case SettingKind::Fuzzy: return "fuzzy";
    }
    return "?";
}

inline SettingKind setting_kind_from_string(std::string_view s) {
    if (s == "classical") return SettingKind::Classical;
    if (s == "nonarchimedean" || s == "non-archimedean" || s == "padic") return SettingKind::NonArchimedean;
    if (s == "random" || s == "rn") return SettingKind::Random;
    if (s == "fuzzy") return SettingKind::Fuzzy;
    throw ConfigError("setting.kind: unknown setting '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// t-norms

enum class TNorm { Minimum, Product, Lukasiewicz };

inline std::string_view to_string(TNorm t) {
    switch (t) {
        case TNorm::Minimum: return "minimum";
        case TNorm::Product: return "product";
        case TNorm::Lukasiewicz: return "lukasiewicz";
    }
    return "?";
}

inline TNorm tnorm_from_string(std::string_view s) {
    if (s == "minimum" || s == "min") return TNorm::Minimum;
    if (s == "product") return TNorm::Product;
    if (s == "lukasiewicz") return TNorm::Lukasiewicz;
    throw ConfigError("setting.tnorm: unknown t-norm '" + std::string(s) + "'");
}

inline double tnorm_apply(TNorm t, double x, double y) {
    if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
        throw DomainError("t-norm arguments must lie in [0,1]");
    switch (t) {
        case TNorm::Minimum: return std::min(x, y);
        case TNorm::Product: return x * y;
        case TNorm::Lukasiewicz: return std::max(x + y - 1.0, 0.0);
    }
    return 0.0;
}

/// Left fold T(...T(T(x1,x2),x3)...,xn).
inline double tnorm_iterate(TNorm t, std::span<const double> values) {
    if (values.empty()) throw DomainError("tnorm_iterate: empty sequence");
    double acc = values.front();
    if (!(acc >= 0.0 && acc <= 1.0)) throw DomainError("t-norm arguments must lie in [0,1]");
    for (std::size_t i = 1; i < values.size(); ++i) acc = tnorm_apply(t, acc, values[i]);
    return acc;
}

// ---------------------------------------------------------------------------
// Distribution functions: the step H_a and the induced μ_u(t) = t/(t+‖u‖).

class DistributionFunction {
public:
    enum class Kind { StepAt, Induced };

    static DistributionFunction step_at(double a) {
        if (!(a >= 0.0)) throw DomainError("H_a requires a >= 0");
        return {Kind::StepAt, a};
    }
    static DistributionFunction induced(double u_norm) {
        if (!(u_norm >= 0.0)) throw DomainError("induced distribution requires a nonnegative norm");
        return {Kind::Induced, u_norm};
    }

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }

    double operator()(double t) const {
        if (kind_ == Kind::StepAt) return t <= param_ ? 0.0 : 1.0;
        if (t <= 0.0) return 0.0;
        return t / (t + param_);
    }

private:
    DistributionFunction(Kind k, double p) : kind_(k), param_(p) {}
    Kind kind_;
    double param_;
};

inline double dist_eval(const DistributionFunction& f, double t) { return f(t); }

// ---------------------------------------------------------------------------
// The example fuzzy norm N(x,t) = αt/(αt + β‖x‖).

struct FuzzyNorm {
    double alpha = 1.0;
    double beta = 1.0;

    FuzzyNorm() = default;
    FuzzyNorm(double a, double b) : alpha(a), beta(b) {
        if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("fuzzy norm requires alpha > 0 and beta > 0");
    }

    double operator()(double x_norm, double t) const {
        if (t <= 0.0) return 0.0;
        const double at = alpha * t;
        return at / (at + beta * x_norm);
    }
};

inline double fuzzy_eval(const FuzzyNorm& n, double x_norm, double t) { return n(x_norm, t); }

// ---------------------------------------------------------------------------

struct NormedSetting {
    SettingKind kind = SettingKind::Classical;
    std::size_t dimension = 1;          // real carriers
    int prime = 2;                      // non-Archimedean carrier
    int precision = kDefaultPrecision;  // non-Archimedean carrier
    TNorm tnorm = TNorm::Minimum;       // random
    FuzzyNorm fuzzy{};                  // fuzzy

    bool real_carrier() const { return kind != SettingKind::NonArchimedean; }
};

/// Log-spaced positive t values.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ConfigError("t_grid: need 0 < min < max and count >= 2");
    std::vector<double> out(count);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

struct AxiomViolation {
    std::string axiom;
    std::string witness;
};

struct AxiomReport {
    std::size_t checks = 0;
    std::vector<AxiomViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Pointwise check of the RN-space axioms for the induced space over the real
/// line: (a) μ_x = H_0 on t>0 iff x = 0, (b) μ_{cx}(t) = μ_x(t/|c|),
/// (c) μ_{x+y}(t+s) >= T(μ_x(t), μ_y(s)). Quantifies over t > 0 only.
inline AxiomReport rn_axioms_check(const NormedSetting& setting, std::span<const double> samples,
                                   std::span<const double> scalars, std::span<const double> t_grid) {
    if (setting.kind != SettingKind::Random) throw ConfigError("rn_axioms_check requires a random setting");
    AxiomReport rep;
    auto mu = [](double x, double t) { return DistributionFunction::induced(std::fabs(x))(t); };
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    for (double x : samples) {
        bool all_one = true;
        for (double t : t_grid) {
            ++rep.checks;
            if (std::fabs(mu(x, t) - 1.0) > kUnitTolerance) all_one = false;
        }
        if (all_one != (x == 0.0)) rep.violations.push_back({"a", "x=" + num(x)});
    }
    for (double x : samples)
        for (double c : scalars) {
            if (c == 0.0) continue;
            for (double t : t_grid) {
                ++rep.checks;
                const double lhs = mu(c * x, t), rhs = mu(x, t / std::fabs(c));
                if (std::fabs(lhs - rhs) > kUnitTolerance)
                    rep.violations.push_back({"b", "x=" + num(x) + " c=" + num(c) + " t=" + num(t)});
            }
        }
    for (double x : samples)
        for (double y : samples)
            for (double t : t_grid)
                for (double s : t_grid) {
                    ++rep.checks;
                    const double lhs = mu(x + y, t + s);
                    const double rhs = tnorm_apply(setting.tnorm, mu(x, t), mu(y, s));
                    if (lhs < rhs - kUnitTolerance)
                        rep.violations.push_back(
                            {"c", "x=" + num(x) + " y=" + num(y) + " t=" + num(t) + " s=" + num(s)});
                }
    return rep;
}

}  // namespace cjlab
