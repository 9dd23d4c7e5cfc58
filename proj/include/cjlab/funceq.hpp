#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cjlab/carrier.hpp"
#include "cjlab/errors.hpp"
#include "cjlab/padic.hpp"

namespace cjlab {

/// Finite sample of carrier points. `depth` is how many halvings/doublings an
/// orbit may take before leaving the declared closure.
template <class C>
struct Grid {
    std::vector<typename C::Point> points;
    std::vector<std::string> ids;
    int depth = 40;

    std::size_t size() const { return points.size(); }
    void push(typename C::Point p) {
        ids.push_back("x" + std::to_string(points.size()));
        points.push_back(std::move(p));
    }
};

template <class C>
struct SampledFunction {
    using Point = typename C::Point;
    std::function<Point(const Point&)> rule;
    Grid<C> grid;
    std::string label;

    Point operator()(const Point& x) const { return rule(x); }
};

template <class C>
struct Triple {
    typename C::Point x, y, z;
};

// ---------------------------------------------------------------------------
// Control functions

enum class ControlFamily { PowerSum, PowerProduct, XiSum, XiProduct, Constant };

inline std::string to_string(ControlFamily f) {
    switch (f) {
        case ControlFamily::PowerSum: return "power_sum";
        case ControlFamily::PowerProduct: return "power_product";
        case ControlFamily::XiSum: return "xi_sum";
        case ControlFamily::XiProduct: return "xi_product";
        case ControlFamily::Constant: return "constant";
    }
    return "?";
}

inline ControlFamily control_family_from_string(const std::string& s) {
    if (s == "power_sum") return ControlFamily::PowerSum;
    if (s == "power_product") return ControlFamily::PowerProduct;
    if (s == "xi_sum") return ControlFamily::XiSum;
    if (s == "xi_product") return ControlFamily::XiProduct;
    if (s == "constant") return ControlFamily::Constant;
    throw ConfigError("control.family: unknown family '" + s + "'");
}

/// φ(x,y,z) as a function of the three norms. `coefficient` is θ, κ or δ
/// depending on the family; the ξ families use ξ(t) = t^s.
struct ControlFunction {
    ControlFamily family = ControlFamily::PowerSum;
    double coefficient = 1.0;
    double r = 1.0;
    std::array<double, 3> p{1.0, 1.0, 1.0};
    double s = 1.0;

    static ControlFunction power_sum(double theta, double r) {
        ControlFunction c;
        c.family = ControlFamily::PowerSum;
        c.coefficient = theta;
        c.r = r;
        c.validate();
        return c;
    }
    static ControlFunction power_product(double theta, double p1, double p2, double p3) {
        ControlFunction c;
        c.family = ControlFamily::PowerProduct;
        c.coefficient = theta;
        c.p = {p1, p2, p3};
        c.validate();
        return c;
    }
    static ControlFunction xi_sum(double kappa, double s) {
        ControlFunction c;
        c.family = ControlFamily::XiSum;
        c.coefficient = kappa;
        c.s = s;
        c.validate();
        return c;
    }
    static ControlFunction xi_product(double kappa, double s) {
        ControlFunction c;
        c.family = ControlFamily::XiProduct;
        c.coefficient = kappa;
        c.s = s;
        c.validate();
        return c;
    }
    static ControlFunction constant(double delta) {
        ControlFunction c;
        c.family = ControlFamily::Constant;
        c.coefficient = delta;
        c.validate();
        return c;
    }

    void validate() const {
        if (!(coefficient >= 0.0) || !std::isfinite(coefficient))
            throw ConfigError("control: coefficient must be a finite nonnegative number");
        auto positive = [](double e, const char* what) {
            if (!(e > 0.0) || !std::isfinite(e))
                throw ConfigError(std::string("control: exponent ") + what + " must be > 0");
        };
        switch (family) {
            case ControlFamily::PowerSum: positive(r, "r"); break;
            case ControlFamily::PowerProduct:
                positive(p[0], "p1");
                positive(p[1], "p2");
                positive(p[2], "p3");
                break;
            case ControlFamily::XiSum:
            case ControlFamily::XiProduct: positive(s, "s"); break;
            case ControlFamily::Constant: break;
        }
    }

    ControlFunction with_coefficient(double c) const {
        ControlFunction out = *this;
        out.coefficient = c;
        out.validate();
        return out;
    }

    /// e with φ(λx,λy,λz) = λ^e φ(x,y,z) for norms scaled by λ.
    double scaling_exponent() const {
        switch (family) {
            case ControlFamily::PowerSum: return r;
            case ControlFamily::PowerProduct: return p[0] + p[1] + p[2];
            case ControlFamily::XiSum: return s;
            case ControlFamily::XiProduct: return 3.0 * s;
            case ControlFamily::Constant: return 0.0;
        }
        return 0.0;
    }

    bool vanishes_on_axes() const {
        return family == ControlFamily::PowerProduct || family == ControlFamily::XiProduct;
    }

    /// ξ(t) for the ξ families.
    long double xi(long double t) const { return t == 0.0L ? 0.0L : std::pow(t, static_cast<long double>(s)); }

    long double shape(long double nx, long double ny, long double nz) const {
        auto pw = [](long double t, double e) -> long double {
            if (t == 0.0L) return 0.0L;
            return std::pow(t, static_cast<long double>(e));
        };
        switch (family) {
            case ControlFamily::PowerSum: return pw(nx, r) + pw(ny, r) + pw(nz, r);
            case ControlFamily::PowerProduct: return pw(nx, p[0]) * pw(ny, p[1]) * pw(nz, p[2]);
            case ControlFamily::XiSum: return xi(nx) + xi(ny) + xi(nz);
            case ControlFamily::XiProduct: return xi(nx) * xi(ny) * xi(nz);
            case ControlFamily::Constant: return 1.0L;
        }
        return 0.0L;
    }

    long double operator()(long double nx, long double ny, long double nz) const {
        return static_cast<long double>(coefficient) * shape(nx, ny, nz);
    }

    std::string describe() const {
        char buf[160];
        switch (family) {
            case ControlFamily::PowerSum:
                std::snprintf(buf, sizeof buf, "power_sum(theta=%.17g, r=%.17g)", coefficient, r);
                break;
            case ControlFamily::PowerProduct:
                std::snprintf(buf, sizeof buf, "power_product(theta=%.17g, p=%.17g,%.17g,%.17g)", coefficient, p[0],
                              p[1], p[2]);
                break;
            case ControlFamily::XiSum:
                std::snprintf(buf, sizeof buf, "xi_sum(kappa=%.17g, s=%.17g)", coefficient, s);
                break;
            case ControlFamily::XiProduct:
                std::snprintf(buf, sizeof buf, "xi_product(kappa=%.17g, s=%.17g)", coefficient, s);
                break;
            case ControlFamily::Constant: std::snprintf(buf, sizeof buf, "constant(delta=%.17g)", coefficient); break;
        }
        return buf;
    }
};

template <class C>
long double control_eval(const C& c, const ControlFunction& phi, const typename C::Point& x,
                         const typename C::Point& y, const typename C::Point& z) {
    return phi(c.norm(x), c.norm(y), c.norm(z));
}

/// φ(x, 2x, x), the weight of the generalized metric.
template <class C>
long double control_diag(const C& c, const ControlFunction& phi, const typename C::Point& x) {
    return control_eval(c, phi, x, c.twice(x), x);
}

/// ξ(t/|2|) <= ξ(1/|2|)ξ(t) on the samples and ξ(1/|2|) < 1/|2|.
inline bool xi_sum_hypothesis(const ControlFunction& phi, long double two, const std::vector<long double>& ts,
                              std::string* witness = nullptr) {
    const long double a = phi.xi(1.0L / two);
    if (!(a < 1.0L / two)) {
        if (witness) *witness = "xi(1/|2|) >= 1/|2|";
        return false;
    }
    for (long double t : ts) {
        const long double lhs = phi.xi(t / two), rhs = a * phi.xi(t);
        if (lhs > rhs * (1.0L + 1e-12L)) {
            if (witness) *witness = "xi(t/|2|) > xi(1/|2|)xi(t) at t=" + std::to_string(static_cast<double>(t));
            return false;
        }
    }
    return true;
}

/// ξ(|2|t) <= ξ(|2|)ξ(t) on the samples and ξ(|2|) < |2|.
inline bool xi_product_hypothesis(const ControlFunction& phi, long double two, const std::vector<long double>& ts,
                                  std::string* witness = nullptr) {
    const long double a = phi.xi(two);
    if (!(a < two)) {
        if (witness) *witness = "xi(|2|) >= |2|";
        return false;
    }
    for (long double t : ts) {
        const long double lhs = phi.xi(two * t), rhs = a * phi.xi(t);
        if (lhs > rhs * (1.0L + 1e-12L)) {
            if (witness) *witness = "xi(|2|t) > xi(|2|)xi(t) at t=" + std::to_string(static_cast<double>(t));
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Defect

template <class C>
typename C::Point defect(const C& c, const SampledFunction<C>& f, const typename C::Point& x,
                         const typename C::Point& y, const typename C::Point& z) {
    const auto xz = c.add(x, z);
    const auto m1 = c.half(c.add(xz, y));
    const auto m2 = c.half(c.sub(xz, y));
    return c.sub(c.add(f(m1), f(m2)), c.add(f(x), f(z)));
}

struct DefectReport {
    double theta = 0.0;
    long double max_defect = 0.0L;
    long double max_ratio = 0.0L;
    std::string witness;
    std::size_t samples = 0;
    ControlFunction fitted;
};

/// Smallest coefficient making ‖Df‖ <= φ on every sampled triple.
template <class C>
DefectReport fit_theta(const C& c, const SampledFunction<C>& f, const ControlFunction& family,
                       const std::vector<Triple<C>>& triples) {
    DefectReport rep;
    const ControlFunction unit = family.with_coefficient(1.0);
    for (const auto& t : triples) {
        const long double d = c.norm(defect(c, f, t.x, t.y, t.z));
        const long double w = control_eval(c, unit, t.x, t.y, t.z);
        ++rep.samples;
        if (d > rep.max_defect) rep.max_defect = d;
        if (w == 0.0L) {
            if (d != 0.0L)
                throw DomainError("fit_theta: control vanishes where the defect does not, at (" + c.describe(t.x) +
                                  ", " + c.describe(t.y) + ", " + c.describe(t.z) + ")");
            continue;
        }
        const long double ratio = d / w;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.witness = "(" + c.describe(t.x) + ", " + c.describe(t.y) + ", " + c.describe(t.z) + ")";
        }
    }
    // Round up so the fitted control dominates every sample after narrowing.
    double theta = static_cast<double>(rep.max_ratio);
    if (static_cast<long double>(theta) < rep.max_ratio) theta = std::nextafter(theta, 1e300);
    rep.theta = theta;
    rep.fitted = family.with_coefficient(theta);
    return rep;
}

/// Largest violation of ‖Df‖ <= φ over the triples; <= 0 means the hypothesis holds.
template <class C>
long double worst_defect_excess(const C& c, const SampledFunction<C>& f, const ControlFunction& phi,
                                const std::vector<Triple<C>>& triples, std::string* witness = nullptr) {
    long double worst = -std::numeric_limits<long double>::infinity();
    for (const auto& t : triples) {
        const long double d = c.norm(defect(c, f, t.x, t.y, t.z));
        const long double w = control_eval(c, phi, t.x, t.y, t.z);
        const long double e = d - w;
        if (e > worst) {
            worst = e;
            if (witness) *witness = "(" + c.describe(t.x) + ", " + c.describe(t.y) + ", " + c.describe(t.z) + ")";
        }
    }
    return worst;
}

/// Smallest ε with ‖f(x+y)-f(x)-f(y)‖ <= ε(‖x‖^p+‖y‖^p) over all ordered grid pairs.
template <class C>
long double fit_cauchy_epsilon(const C& c, const SampledFunction<C>& f, double p,
                               const std::vector<typename C::Point>& pts) {
    auto pw = [p](long double t) -> long double {
        if (p == 0.0) return 1.0L;  // 0^0 = 1
        return t == 0.0L ? 0.0L : std::pow(t, static_cast<long double>(p));
    };
    long double eps = 0.0L;
    for (const auto& x : pts)
        for (const auto& y : pts) {
            const long double d = c.norm(c.sub(f(c.add(x, y)), c.add(f(x), f(y))));
            const long double w = pw(c.norm(x)) + pw(c.norm(y));
            if (w == 0.0L) {
                if (d != 0.0L) throw DomainError("fit_cauchy_epsilon: nonzero defect at the origin");
                continue;
            }
            eps = std::max(eps, d / w);
        }
    return eps;
}

// ---------------------------------------------------------------------------
// Triple samples

/// Orbit triples (x/2^{k+1}, x/2^k, x/2^{k+1}) for k < down_depth and
/// (2^k x, 2^{k+1} x, 2^k x) for k < up_depth, plus (x,0,-x) per grid point and
/// all ordered triples over the first `combo_points` grid points. All-zero
/// triples are skipped.
template <class C>
std::vector<Triple<C>> standard_triples(const C& c, const Grid<C>& grid, int down_depth, int up_depth,
                                        std::size_t combo_points = 8) {
    std::vector<Triple<C>> out;
    auto push = [&](const typename C::Point& x, const typename C::Point& y, const typename C::Point& z) {
        if (c.is_zero(x) && c.is_zero(y) && c.is_zero(z)) return;
        out.push_back({x, y, z});
    };
    for (const auto& x : grid.points) {
        push(x, c.zero(), c.neg(x));
        auto down = x;
        for (int k = 0; k < down_depth; ++k) {
            const auto h = c.half(down);
            push(h, down, h);
            down = h;
        }
        auto up = x;
        for (int k = 0; k < up_depth; ++k) {
            const auto d = c.twice(up);
            push(up, d, up);
            up = d;
        }
    }
    const std::size_t m = std::min(combo_points, grid.points.size());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) push(grid.points[i], grid.points[j], grid.points[k]);
    return out;
}

/// Drops triples with a zero coordinate. Product controls vanish there, so only
/// an additive-plus-constant map can satisfy the defect bound on the axes.
template <class C>
std::vector<Triple<C>> off_axis_triples(const C& c, const std::vector<Triple<C>>& in) {
    std::vector<Triple<C>> out;
    for (const auto& t : in)
        if (!c.is_zero(t.x) && !c.is_zero(t.y) && !c.is_zero(t.z)) out.push_back(t);
    return out;
}

// ---------------------------------------------------------------------------
// Grids

/// {0} ∪ {±s·2^{-k} : s in seeds, 0 <= k <= levels}, deduplicated, in insertion order.
inline Grid<RealCarrier> real_grid(const RealCarrier& c, const std::vector<double>& seeds, int levels, int depth,
                                   bool include_zero = true) {
    Grid<RealCarrier> g;
    g.depth = depth;
    auto add = [&](double v) {
        RealVec p(c.dimension);
        p[0] = v;
        for (const auto& q : g.points)
            if (q == p) return;
        g.push(p);
    };
    if (include_zero) add(0.0);
    for (double s : seeds)
        for (int k = 0; k <= levels; ++k) {
            const double v = std::ldexp(s, -k);
            add(v);
            add(-v);
        }
    return g;
}

inline Grid<RealCarrier> real_grid_points(const RealCarrier& c, const std::vector<double>& pts, int depth) {
    Grid<RealCarrier> g;
    g.depth = depth;
    for (double v : pts) {
        RealVec p(c.dimension);
        p[0] = v;
        g.push(p);
    }
    return g;
}

/// {0} ∪ {±(a/b)·2^{-k}} in Q_p.
inline Grid<PadicCarrier> padic_grid(const PadicCarrier& c, const std::vector<std::pair<std::int64_t, std::int64_t>>& seeds,
                                     int levels, int depth, bool include_zero = true) {
    Grid<PadicCarrier> g;
    g.depth = depth;
    auto add = [&](const PAdicNumber& p) {
        for (const auto& q : g.points)
            if (q == p) return;
        g.push(p);
    };
    if (include_zero) add(c.zero());
    for (const auto& [a, b] : seeds) {
        PAdicNumber v = c.rational(a, b);
        for (int k = 0; k <= levels; ++k) {
            add(v);
            add(-v);
            v = c.half(v);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Perturbed functions

struct Perturbation {
    enum class Kind { None, Power, ValuationShift };
    Kind kind = Kind::None;
    double epsilon = 0.0;        // power
    double r = 0.0;              // power exponent, or valuation multiplier
    std::int64_t c_num = 1;      // valuation shift coefficient c = c_num/c_den
    std::int64_t c_den = 1;
    int m = 0;                   // valuation shift offset

    static Perturbation none() { return {}; }
    static Perturbation power(double eps, double r) {
        Perturbation p;
        p.kind = Kind::Power;
        p.epsilon = eps;
        p.r = r;
        return p;
    }
    static Perturbation valuation_shift(std::int64_t num, std::int64_t den, int m, double r) {
        Perturbation p;
        p.kind = Kind::ValuationShift;
        p.c_num = num;
        p.c_den = den;
        p.m = m;
        p.r = r;
        return p;
    }
};

inline std::string to_string(Perturbation::Kind k) {
    switch (k) {
        case Perturbation::Kind::None: return "none";
        case Perturbation::Kind::Power: return "power";
        case Perturbation::Kind::ValuationShift: return "valuation_shift";
    }
    return "?";
}

/// f(x) = a·x + ε‖x‖^r·u. r = 0 gives the constant offset ε·u, including at 0.
inline SampledFunction<RealCarrier> make_perturbed(const RealCarrier& c, double a, const Perturbation& pert,
                                                   Grid<RealCarrier> grid) {
    SampledFunction<RealCarrier> f;
    f.grid = std::move(grid);
    char buf[128];
    switch (pert.kind) {
        case Perturbation::Kind::None:
            std::snprintf(buf, sizeof buf, "%.17g*x", a);
            f.rule = [c, a](const RealVec& x) { return c.scale(a, x); };
            break;
        case Perturbation::Kind::Power: {
            if (!(pert.r >= 0.0) || !(pert.epsilon >= 0.0))
                throw ConfigError("perturbation: power requires epsilon >= 0 and r >= 0");
            std::snprintf(buf, sizeof buf, "%.17g*x + %.17g*|x|^%.17g", a, pert.epsilon, pert.r);
            const double eps = pert.epsilon, r = pert.r;
            const RealVec u = c.unit();
            f.rule = [c, a, eps, r, u](const RealVec& x) {
                const double n = x.norm();
                const double w = r == 0.0 ? 1.0 : (n == 0.0 ? 0.0 : std::pow(n, r));
                return c.add(c.scale(a, x), c.scale(eps * w, u));
            };
            break;
        }
        case Perturbation::Kind::ValuationShift:
            throw ConfigError("perturbation: valuation_shift requires a non-Archimedean setting");
    }
    f.label = buf;
    return f;
}

/// f(x) = a·x + c·p^{m+⌈r·v(x)⌉}, with the shift 0 at x = 0.
inline SampledFunction<PadicCarrier> make_perturbed(const PadicCarrier& c, const PAdicNumber& a,
                                                    const Perturbation& pert, Grid<PadicCarrier> grid) {
    SampledFunction<PadicCarrier> f;
    f.grid = std::move(grid);
    switch (pert.kind) {
        case Perturbation::Kind::None:
            f.label = a.to_literal() + "*x";
            f.rule = [a](const PAdicNumber& x) { return a * x; };
            break;
        case Perturbation::Kind::ValuationShift: {
            if (pert.c_den == 0) throw ConfigError("perturbation: valuation_shift coefficient has zero denominator");
            const PAdicNumber coef = c.rational(pert.c_num, pert.c_den);
            const int m = pert.m;
            const double r = pert.r;
            const int prec = c.precision;
            const int p = c.prime;
            f.label = a.to_literal() + "*x + (" + std::to_string(pert.c_num) + "/" + std::to_string(pert.c_den) +
                      ")*p^(" + std::to_string(m) + "+ceil(" + std::to_string(r) + "*v(x)))";
            f.rule = [a, coef, m, r, prec, p](const PAdicNumber& x) {
                if (x.is_zero()) return a * x;
                const int e = m + static_cast<int>(std::ceil(r * static_cast<double>(x.valuation())));
                return a * x + coef * PAdicNumber::power_of_prime(p, e, prec);
            };
            break;
        }
        case Perturbation::Kind::Power:
            throw ConfigError("perturbation: power requires a real setting");
    }
    return f;
}

}  // namespace cjlab
