#pragma once

#include <climits>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "cjlab/carrier.hpp"
#include "cjlab/errors.hpp"
#include "cjlab/funceq.hpp"

namespace cjlab {

enum class Direction { Downscale, Upscale };

inline std::string to_string(Direction d) { return d == Direction::Downscale ? "downscale" : "upscale"; }

inline Direction direction_from_string(const std::string& s) {
    if (s == "downscale" || s == "down") return Direction::Downscale;
    if (s == "upscale" || s == "up") return Direction::Upscale;
    throw ConfigError("direction: expected 'downscale' or 'upscale', got '" + s + "'");
}

/// Consecutive small steps required before a point counts as converged.
inline constexpr int kConvergenceRun = 3;
inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr int kDefaultTraceLength = 8;
/// Marks a zero difference in a valuation trace.
inline constexpr int kZeroValuation = INT_MAX;

inline std::string format_real(long double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v));
    return buf;
}

/// ‖a-b‖ as text: exact rational for Q_p, %.17g otherwise.
template <class C>
std::string exact_distance(const C& c, const typename C::Point& a, const typename C::Point& b) {
    if constexpr (C::exact) {
        return c.exact_norm(c.sub(a, b)).to_string();
    } else {
        return format_real(c.norm(c.sub(a, b)));
    }
}

/// Whether two successive iterates agree to within the stopping rule.
template <class C>
bool step_small(const C& c, const typename C::Point& a, const typename C::Point& b, double tol) {
    if constexpr (C::exact) {
        if (c.same(a, b)) return true;
        return agrees_to(a, b, precision_floor(a, b));
    } else {
        return c.norm(c.sub(a, b)) < tol;
    }
}

template <class C>
struct PointResult {
    using Point = typename C::Point;
    std::string id;
    Point x;
    Point fx;
    Point A;
    long double error = 0.0L;
    std::string error_text;
    bool converged = false;
    int iterations = 0;
    std::vector<long double> step_norms;
    std::vector<int> step_valuations;  // Q_p only; kZeroValuation for an exact zero
    std::vector<std::string> trace;
};

template <class C>
struct ExtractionResult {
    Direction direction = Direction::Downscale;
    int n_max = 0;
    double tol = kDefaultTolerance;
    std::vector<PointResult<C>> points;

    bool all_converged() const {
        for (const auto& p : points)
            if (!p.converged) return false;
        return true;
    }
    long double max_error() const {
        long double m = 0.0L;
        for (const auto& p : points) m = std::max(m, p.error);
        return m;
    }
    const PointResult<C>* find(const C& c, const typename C::Point& x) const {
        for (const auto& p : points)
            if (c.same(p.x, x)) return &p;
        return nullptr;
    }
};

/// Runs the per-point convergence rule over an already computed iterate sequence.
template <class C>
void settle(const C& c, PointResult<C>& out, const std::vector<typename C::Point>& it, double tol,
            int trace_len) {
    out.fx = it.front();
    int run = 0;
    int start = -1;
    for (std::size_t n = 0; n < it.size(); ++n) {
        if (static_cast<int>(n) < trace_len) out.trace.push_back(c.describe(it[n]));
        if (n == 0) continue;
        const auto d = c.sub(it[n], it[n - 1]);
        out.step_norms.push_back(c.norm(d));
        if constexpr (C::exact) out.step_valuations.push_back(d.is_zero() ? kZeroValuation : d.valuation());
        if (step_small(c, it[n], it[n - 1], tol)) {
            if (run == 0) start = static_cast<int>(n);
            ++run;
        } else {
            run = 0;
        }
        if (run >= kConvergenceRun && !out.converged) {
            out.converged = true;
            out.iterations = start;
            out.A = it[static_cast<std::size_t>(start) - 1];
        }
    }
    if (!out.converged) {
        out.iterations = static_cast<int>(it.size()) - 1;
        out.A = it.back();
    }
    out.error = c.norm(c.sub(out.fx, out.A));
    out.error_text = exact_distance(c, out.fx, out.A);
}

/// J^n f(x) for n = 0..n (Downscale: 2^n f(x/2^n); Upscale: f(2^n x)/2^n).
template <class C>
std::vector<typename C::Point> rescaled_iterates(const C& c, const SampledFunction<C>& f,
                                                 const typename C::Point& x, Direction dir, int n) {
    std::vector<typename C::Point> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    auto arg = x;
    for (int k = 0; k <= n; ++k) {
        auto v = f(arg);
        for (int j = 0; j < k; ++j) v = dir == Direction::Downscale ? c.twice(v) : c.half(v);
        out.push_back(std::move(v));
        arg = dir == Direction::Downscale ? c.half(arg) : c.twice(arg);
    }
    return out;
}

template <class C>
ExtractionResult<C> extract(const C& c, const SampledFunction<C>& f, Direction dir, int n_max,
                            double tol = kDefaultTolerance, int trace_len = kDefaultTraceLength) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (n_max > f.grid.depth)
        throw DepthError("extract: n_max " + std::to_string(n_max) + " exceeds grid depth " +
                         std::to_string(f.grid.depth));
    ExtractionResult<C> res;
    res.direction = dir;
    res.n_max = n_max;
    res.tol = tol;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        PointResult<C> pr;
        pr.id = f.grid.ids[i];
        pr.x = f.grid.points[i];
        settle(c, pr, rescaled_iterates(c, f, pr.x, dir, n_max), tol, trace_len);
        res.points.push_back(std::move(pr));
    }
    return res;
}

/// Nonzero step valuations strictly increase until the first exact zero.
template <class C>
bool valuations_strictly_increase(const PointResult<C>& p) {
    int prev = INT_MIN;
    for (int v : p.step_valuations) {
        if (v == kZeroValuation) return true;
        if (v <= prev) return false;
        prev = v;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Running-max bounds £(x)

struct PoundsResult {
    long double value = 0.0L;
    std::vector<long double> terms;
    int argmax = 0;
    /// The running max stopped growing well before the last term.
    bool settled = true;
};

inline PoundsResult finish_pounds(std::vector<long double> terms) {
    PoundsResult r;
    r.terms = std::move(terms);
    for (std::size_t k = 0; k < r.terms.size(); ++k)
        if (r.terms[k] > r.value) {
            r.value = r.terms[k];
            r.argmax = static_cast<int>(k);
        }
    const int n = static_cast<int>(r.terms.size());
    r.settled = r.value == 0.0L || r.argmax < n - kConvergenceRun;
    return r;
}

/// max_{k<n} |2|^k ζ(x/2^{k+1}, x/2^k, x/2^{k+1}).
template <class C>
PoundsResult bound_pounds_down(const C& c, const ControlFunction& zeta, const typename C::Point& x, int n) {
    std::vector<long double> terms;
    auto xk = x;
    long double w = 1.0L;
    for (int k = 0; k < n; ++k) {
        const auto h = c.half(xk);
        terms.push_back(w * control_eval(c, zeta, h, xk, h));
        xk = h;
        w *= c.two();
    }
    return finish_pounds(std::move(terms));
}

/// max_{k<n} ζ(2^k x, 2^{k+1} x, 2^k x) / |2|^k. The theorem's bound is this over |2|.
template <class C>
PoundsResult bound_pounds_up(const C& c, const ControlFunction& zeta, const typename C::Point& x, int n) {
    std::vector<long double> terms;
    auto xk = x;
    long double w = 1.0L;
    for (int k = 0; k < n; ++k) {
        const auto d = c.twice(xk);
        terms.push_back(control_eval(c, zeta, xk, d, xk) / w);
        xk = d;
        w *= c.two();
    }
    return finish_pounds(std::move(terms));
}

// ---------------------------------------------------------------------------
// Closed-form radii on real carriers

struct BoundResult {
    bool admissible = false;
    long double value = 0.0L;
    std::string reason;
};

/// φ(x,2x,x)/(2-2^e) upscale (e<1) or φ(x,2x,x)/(2^e-2) downscale (e>1), for the
/// power families. For PowerSum this is θ(2^r+2)‖x‖^r/|2-2^r|.
inline BoundResult classical_bound(const ControlFunction& phi, Direction dir, long double x_norm) {
    BoundResult b;
    if (phi.family != ControlFamily::PowerSum && phi.family != ControlFamily::PowerProduct) {
        b.reason = "closed-form radius needs a power_sum or power_product control";
        return b;
    }
    const long double e = phi.scaling_exponent();
    const long double diag = phi(x_norm, 2.0L * x_norm, x_norm);
    if (dir == Direction::Upscale) {
        if (!(e < 1.0L)) {
            b.reason = "upscale radius needs exponent < 1, got " + format_real(e);
            return b;
        }
        b.value = diag / (2.0L - std::pow(2.0L, e));
    } else {
        if (!(e > 1.0L)) {
            b.reason = "downscale radius needs exponent > 1, got " + format_real(e);
            return b;
        }
        b.value = diag / (std::pow(2.0L, e) - 2.0L);
    }
    b.admissible = true;
    return b;
}

// ---------------------------------------------------------------------------
// Properties of the extracted map

struct ResidualReport {
    std::size_t pairs = 0;
    long double max_residual = 0.0L;
    std::string witness;
    bool ok = true;
};

/// ‖A(x+y) - A(x) - A(y)‖ over grid pairs whose sum is a grid point.
template <class C>
ResidualReport additivity_residual(const C& c, const ExtractionResult<C>& r, double tol) {
    ResidualReport rep;
    for (const auto& a : r.points)
        for (const auto& b : r.points) {
            const auto* s = r.find(c, c.add(a.x, b.x));
            if (!s) continue;
            ++rep.pairs;
            const auto lhs = s->A;
            const auto rhs = c.add(a.A, b.A);
            const long double d = c.norm(c.sub(lhs, rhs));
            bool good;
            if constexpr (C::exact) {
                good = c.same(lhs, rhs) || agrees_to(lhs, rhs, precision_floor(lhs, rhs));
            } else {
                good = d <= tol;
            }
            if (d > rep.max_residual || (!good && rep.ok)) {
                rep.max_residual = std::max(rep.max_residual, d);
                rep.witness = a.id + "+" + b.id;
            }
            if (!good) rep.ok = false;
        }
    return rep;
}

/// ‖A(2x) - 2A(x)‖ over grid points whose double is a grid point.
template <class C>
ResidualReport homogeneity_residual(const C& c, const ExtractionResult<C>& r, double tol) {
    ResidualReport rep;
    for (const auto& a : r.points) {
        const auto* d2 = r.find(c, c.twice(a.x));
        if (!d2) continue;
        ++rep.pairs;
        const auto rhs = c.twice(a.A);
        const long double d = c.norm(c.sub(d2->A, rhs));
        bool good;
        if constexpr (C::exact) {
            good = c.same(d2->A, rhs) || agrees_to(d2->A, rhs, precision_floor(d2->A, rhs));
        } else {
            good = d <= tol;
        }
        if (d > rep.max_residual) {
            rep.max_residual = d;
            rep.witness = a.id;
        }
        if (!good) rep.ok = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Direction advisory

struct DirectionAdvice {
    long double alpha_down = 0.0L;
    long double alpha_up = 0.0L;
    bool has_recommendation = false;
    Direction recommended = Direction::Downscale;
};

/// Estimates the largest ratio φ(x/2,y/2,z/2)/φ(x,y,z) over the triples, giving
/// α_down = |2|·that for Jg = 2g(x/2) and α_up = (1/|2|)·max φ(2·)/φ(·).
template <class C>
DirectionAdvice recommend_direction(const C& c, const ControlFunction& phi, const std::vector<Triple<C>>& triples) {
    DirectionAdvice adv;
    long double shrink = 0.0L, grow = 0.0L;
    for (const auto& t : triples) {
        const long double w = control_eval(c, phi, t.x, t.y, t.z);
        if (w == 0.0L) continue;
        shrink = std::max(shrink, control_eval(c, phi, c.half(t.x), c.half(t.y), c.half(t.z)) / w);
        grow = std::max(grow, control_eval(c, phi, c.twice(t.x), c.twice(t.y), c.twice(t.z)) / w);
    }
    adv.alpha_down = c.two() * shrink;
    adv.alpha_up = grow / c.two();
    if (adv.alpha_down < 1.0L) {
        adv.has_recommendation = true;
        adv.recommended = Direction::Downscale;
    } else if (adv.alpha_up < 1.0L) {
        adv.has_recommendation = true;
        adv.recommended = Direction::Upscale;
    }
    return adv;
}

}  // namespace cjlab
