#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cjlab/direct.hpp"
#include "cjlab/funceq.hpp"
#include "cjlab/spaces.hpp"

namespace cjlab {

/// Burn-in before the decay ratio is held to the declared constant.
inline constexpr int kDecayBurnIn = 2;
/// Levels below this fraction of d(f,A) are rounding noise, not decay.
inline constexpr double kDecayFloor = 1e-6;
inline constexpr int kProbePairs = 8;

struct ContractionOperator {
    Direction direction = Direction::Downscale;
    long double lipschitz = 0.0L;
};

/// |2|^{1-e} for Jg = 2g(x/2) and |2|^{e-1} for Jg = g(2x)/2, where e is the
/// scaling exponent of φ.
inline long double declared_lipschitz(const ControlFunction& phi, Direction dir, long double two) {
    const long double e = phi.scaling_exponent();
    return dir == Direction::Downscale ? std::pow(two, 1.0L - e) : std::pow(two, e - 1.0L);
}

struct GeneralizedMetricValue {
    long double value = 0.0L;
    bool infinite = false;
    std::string witness;

    bool operator<=(long double b) const { return !infinite && value <= b; }
};

inline std::string to_string(const GeneralizedMetricValue& d) { return d.infinite ? "inf" : format_real(d.value); }

/// sup over `points` of ‖g(x)-h(x)‖ / φ(x,2x,x); +∞ where φ vanishes and g != h.
template <class C, class G, class H>
GeneralizedMetricValue gen_metric(const C& c, const G& g, const H& h, const ControlFunction& phi,
                                  const std::vector<typename C::Point>& points) {
    GeneralizedMetricValue d;
    for (const auto& x : points) {
        const auto diff = c.sub(g(x), h(x));
        if (c.is_zero(diff)) continue;
        const long double w = control_diag(c, phi, x);
        if (w == 0.0L) {
            d.infinite = true;
            d.value = std::numeric_limits<long double>::infinity();
            d.witness = c.describe(x);
            return d;
        }
        const long double r = c.norm(diff) / w;
        if (r > d.value) {
            d.value = r;
            d.witness = c.describe(x);
        }
    }
    return d;
}

template <class C>
GeneralizedMetricValue gen_metric(const C& c, const SampledFunction<C>& g, const SampledFunction<C>& h,
                                  const ControlFunction& phi) {
    return gen_metric(c, g, h, phi, g.grid.points);
}

/// Jg on a grid one level shallower.
template <class C>
SampledFunction<C> apply_J(const C& c, const SampledFunction<C>& g, const ContractionOperator& op) {
    if (g.grid.depth <= 0) throw DepthError("apply_J: grid depth exhausted");
    SampledFunction<C> out;
    out.grid = g.grid;
    out.grid.depth = g.grid.depth - 1;
    auto inner = std::make_shared<const SampledFunction<C>>(g);
    if (op.direction == Direction::Downscale) {
        out.rule = [c, inner](const typename C::Point& x) { return c.twice((*inner)(c.half(x))); };
        out.label = "2*(" + g.label + ")(x/2)";
    } else {
        out.rule = [c, inner](const typename C::Point& x) { return c.half((*inner)(c.twice(x))); };
        out.label = "(" + g.label + ")(2x)/2";
    }
    return out;
}

/// x·2^{-k} (Downscale) or x·2^{k} (Upscale) for every grid point and 0 <= k < levels.
template <class C>
std::vector<typename C::Point> orbit_points(const C& c, const Grid<C>& grid, Direction dir, int levels) {
    std::vector<typename C::Point> out;
    for (const auto& x : grid.points) {
        auto y = x;
        for (int k = 0; k < levels; ++k) {
            out.push_back(y);
            y = dir == Direction::Downscale ? c.half(y) : c.twice(y);
        }
    }
    return out;
}

struct MetricRow {
    int n = 0;
    GeneralizedMetricValue distance;  // d(J^n f, A)
    long double ratio = 0.0L;         // d_n / d_{n-1}, 0 when undefined
};

template <class C>
struct FixedPointResult {
    ExtractionResult<C> extraction;
    ContractionOperator op;
    bool contraction = false;  // declared constant < 1
    GeneralizedMetricValue d_f_Jf;
    long double radius = std::numeric_limits<long double>::infinity();
    std::vector<MetricRow> trace;
    bool decay_ok = true;
    std::string decay_witness;
    long double max_decay_ratio = 0.0L;
    bool apriori_ok = true;
    long double max_error_ratio = 0.0L;
    std::string apriori_witness;
};

template <class C>
FixedPointResult<C> iterate_to_fixed_point(const C& c, const SampledFunction<C>& f, const ContractionOperator& op,
                                           const ControlFunction& phi, int n_max, double tol = kDefaultTolerance,
                                           int trace_len = kDefaultTraceLength) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (n_max > f.grid.depth)
        throw DepthError("iterate_to_fixed_point: n_max " + std::to_string(n_max) + " exceeds grid depth " +
                         std::to_string(f.grid.depth));
    FixedPointResult<C> res;
    res.op = op;
    res.contraction = op.lipschitz < 1.0L;

    std::vector<SampledFunction<C>> js{f};
    for (int n = 1; n <= n_max; ++n) js.push_back(apply_J(c, js.back(), op));

    auto& ex = res.extraction;
    ex.direction = op.direction;
    ex.n_max = n_max;
    ex.tol = tol;
    std::vector<std::vector<typename C::Point>> values(f.grid.size());
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        for (const auto& g : js) values[i].push_back(g(f.grid.points[i]));
        PointResult<C> pr;
        pr.id = f.grid.ids[i];
        pr.x = f.grid.points[i];
        settle(c, pr, values[i], tol, trace_len);
        ex.points.push_back(std::move(pr));
    }

    // d(f, Jf) along the orbit the error telescopes over.
    const auto orbit = orbit_points(c, f.grid, op.direction, n_max);
    res.d_f_Jf = gen_metric(c, f, js[1], phi, orbit);
    if (res.contraction && !res.d_f_Jf.infinite) res.radius = res.d_f_Jf.value / (1.0L - op.lipschitz);

    // d(J^n f, A) on the grid.
    long double d0 = 0.0L;
    for (int n = 0; n <= n_max; ++n) {
        MetricRow row;
        row.n = n;
        for (std::size_t i = 0; i < f.grid.size(); ++i) {
            const auto& x = f.grid.points[i];
            const auto diff = c.sub(values[i][static_cast<std::size_t>(n)], ex.points[i].A);
            if (c.is_zero(diff)) continue;
            const long double w = control_diag(c, phi, x);
            if (w == 0.0L) {
                row.distance.infinite = true;
                row.distance.value = std::numeric_limits<long double>::infinity();
                row.distance.witness = f.grid.ids[i];
                break;
            }
            const long double r = c.norm(diff) / w;
            if (r > row.distance.value) {
                row.distance.value = r;
                row.distance.witness = f.grid.ids[i];
            }
        }
        if (n == 0) d0 = row.distance.value;
        if (n > 0) {
            const auto& prev = res.trace.back().distance;
            if (!prev.infinite && !row.distance.infinite && prev.value > 0.0L && row.distance.value > 0.0L)
                row.ratio = row.distance.value / prev.value;
            const bool measurable = n >= kDecayBurnIn && row.ratio > 0.0L &&
                                    row.distance.value >= static_cast<long double>(kDecayFloor) * d0;
            if (measurable) {
                res.max_decay_ratio = std::max(res.max_decay_ratio, row.ratio);
                if (row.ratio > op.lipschitz + static_cast<long double>(kCertificateSlack) && res.decay_ok) {
                    res.decay_ok = false;
                    res.decay_witness = "n=" + std::to_string(n) + " ratio=" + format_real(row.ratio);
                }
            }
        }
        res.trace.push_back(row);
    }

    // ‖f(x) - A(x)‖ / φ(x,2x,x) against the a-priori radius.
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        const auto& p = ex.points[i];
        if (p.error == 0.0L) continue;
        const long double w = control_diag(c, phi, p.x);
        const long double r = w == 0.0L ? std::numeric_limits<long double>::infinity() : p.error / w;
        if (r > res.max_error_ratio) {
            res.max_error_ratio = r;
            res.apriori_witness = p.id;
        }
    }
    res.apriori_ok = res.max_error_ratio <=
                     res.radius + static_cast<long double>(kCertificateSlack) * std::max(1.0L, res.radius);
    return res;
}

// ---------------------------------------------------------------------------
// Lipschitz probes

template <class C>
struct ProbePair {
    SampledFunction<C> g, h;
    std::string label;
};

struct LipschitzReport {
    long double declared = 0.0L;
    long double max_ratio = 0.0L;
    std::size_t measured = 0;
    std::size_t skipped = 0;
    std::string witness;
    bool pass = true;
};

/// max d(Jg,Jh)/d(g,h). d(g,h) is taken over the orbit to `levels` and d(Jg,Jh)
/// one level shallower, so every value Jg reads is inside the first sample.
template <class C>
LipschitzReport lipschitz_probe(const C& c, const ContractionOperator& op, const ControlFunction& phi,
                                const std::vector<ProbePair<C>>& probes, const Grid<C>& grid, int levels) {
    LipschitzReport rep;
    rep.declared = op.lipschitz;
    const auto outer = orbit_points(c, grid, op.direction, levels + 1);
    const auto inner = orbit_points(c, grid, op.direction, levels);
    for (const auto& pr : probes) {
        const auto dgh = gen_metric(c, pr.g, pr.h, phi, outer);
        if (dgh.infinite || dgh.value == 0.0L) {
            ++rep.skipped;
            continue;
        }
        auto g = pr.g, h = pr.h;
        g.grid.depth = h.grid.depth = std::max(g.grid.depth, 1);
        const auto dj = gen_metric(c, apply_J(c, g, op), apply_J(c, h, op), phi, inner);
        ++rep.measured;
        const long double ratio = dj.infinite ? std::numeric_limits<long double>::infinity() : dj.value / dgh.value;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.witness = pr.label;
        }
    }
    rep.pass = rep.max_ratio <= rep.declared + static_cast<long double>(kCertificateSlack);
    return rep;
}

/// (f, Jf) plus kProbePairs seeded pairs (core, core + c_i·w_i·(f - core)).
inline std::vector<ProbePair<RealCarrier>> probe_pairs(const RealCarrier& c, const SampledFunction<RealCarrier>& f,
                                                       const SampledFunction<RealCarrier>& core,
                                                       const ContractionOperator& op, std::uint64_t seed) {
    std::vector<ProbePair<RealCarrier>> out;
    auto ff = f;
    ff.grid.depth = std::max(ff.grid.depth, 1);
    out.push_back({f, apply_J(c, ff, op), "(f, Jf)"});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-4.0, 4.0), freq(0.1, 3.0);
    for (int i = 0; i < kProbePairs; ++i) {
        const double a = coef(rng), k = freq(rng);
        SampledFunction<RealCarrier> h = core;
        h.rule = [c, f, core, a, k](const RealVec& x) {
            const RealVec d = c.sub(f(x), core(x));
            return c.add(core(x), c.scale(a * (1.0 + 0.5 * std::sin(k * x[0])), d));
        };
        h.label = "core + " + format_real(a) + "(1+sin/2)(f-core)";
        out.push_back({core, h, "probe " + std::to_string(i)});
    }
    return out;
}

inline std::vector<ProbePair<PadicCarrier>> probe_pairs(const PadicCarrier& c, const SampledFunction<PadicCarrier>& f,
                                                        const SampledFunction<PadicCarrier>& core,
                                                        const ContractionOperator& op, std::uint64_t seed) {
    std::vector<ProbePair<PadicCarrier>> out;
    auto ff = f;
    ff.grid.depth = std::max(ff.grid.depth, 1);
    out.push_back({f, apply_J(c, ff, op), "(f, Jf)"});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> num(-64, 64), den(1, 64);
    for (int i = 0; i < kProbePairs; ++i) {
        std::int64_t a = num(rng);
        if (a == 0) a = 1;
        const std::int64_t b = den(rng);
        const PAdicNumber k = c.rational(a, b);
        SampledFunction<PadicCarrier> h = core;
        h.rule = [f, core, k](const PAdicNumber& x) { return core(x) + k * (f(x) - core(x)); };
        h.label = "core + (" + std::to_string(a) + "/" + std::to_string(b) + ")(f-core)";
        out.push_back({core, h, "probe " + std::to_string(i)});
    }
    return out;
}

}  // namespace cjlab
