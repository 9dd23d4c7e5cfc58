#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cjlab/direct.hpp"
#include "cjlab/fixedpoint.hpp"
#include "cjlab/funceq.hpp"
#include "cjlab/spaces.hpp"

namespace cjlab {

/// |2|^N ζ(·/2^N) (or ζ(2^N ·)/|2|^N) must fall below this fraction of its n=0 value.
inline constexpr long double kLimitFraction = 1e-6L;
/// Relative tolerance when checking an inequality between two control values.
inline constexpr long double kControlRelTol = 1e-12L;

inline const std::vector<std::string>& theorem_ids() {
    static const std::vector<std::string> ids{"NA-FP-down", "NA-FP-up", "NA-D-down", "NA-D-up", "RN-D-down",
                                              "RN-D-up",    "RN-FP-down", "RN-FP-up", "FZ-D-down", "FZ-D-up",
                                              "FZ-FP-down", "FZ-FP-up", "CL-RASSIAS"};
    return ids;
}

inline bool is_theorem_id(const std::string& id) {
    const auto& ids = theorem_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

/// Setting a theorem id belongs to.
inline SettingKind theorem_setting(const std::string& id) {
    if (id.rfind("NA-", 0) == 0) return SettingKind::NonArchimedean;
    if (id.rfind("RN-", 0) == 0) return SettingKind::Random;
    if (id.rfind("FZ-", 0) == 0) return SettingKind::Fuzzy;
    if (id == "CL-RASSIAS") return SettingKind::Classical;
    throw ConfigError("theorems: unknown theorem id '" + id + "'");
}

inline Direction theorem_direction(const std::string& id) {
    if (id.size() > 3 && id.compare(id.size() - 3, 3, "-up") == 0) return Direction::Upscale;
    if (id == "CL-RASSIAS") return Direction::Upscale;
    return Direction::Downscale;
}

inline bool theorem_is_fixed_point(const std::string& id) { return id.find("-FP-") != std::string::npos; }

enum class CertStatus { Pass, Fail, HypothesisViolated };

inline std::string to_string(CertStatus s) {
    switch (s) {
        case CertStatus::Pass: return "pass";
        case CertStatus::Fail: return "fail";
        case CertStatus::HypothesisViolated: return "hypothesis-violated";
    }
    return "?";
}

struct HypothesisCheck {
    std::string name;
    bool ok = true;
    std::string detail;
};

/// One grid point. For RN/fuzzy rows `margin` is the minimum over the t-grid
/// and `t_witness` the t attaining it; `bound` is the deterministic radius the
/// inequality is equivalent to.
struct CertRow {
    std::string point_id;
    long double error = 0.0L;
    std::string error_text;
    long double bound = 0.0L;
    long double margin = 0.0L;
    double t_witness = 0.0;
    bool converged = true;
    int iterations = 0;
    bool ok = true;
};

struct Certificate {
    std::string theorem_id;
    std::string variant = "theorem";
    std::string setting;
    std::vector<HypothesisCheck> hypotheses;
    std::vector<CertRow> rows;
    long double min_margin = std::numeric_limits<long double>::infinity();
    std::string witness;
    CertStatus status = CertStatus::Pass;
    std::vector<std::string> notes;

    bool pass() const { return status == CertStatus::Pass; }
    bool hypotheses_ok() const {
        for (const auto& h : hypotheses)
            if (!h.ok) return false;
        return true;
    }
    void require(std::string name, bool ok, std::string detail = {}) {
        hypotheses.push_back({std::move(name), ok, std::move(detail)});
    }
    /// Recomputes min_margin, witness and status; safe to call again after
    /// appending hypotheses.
    void finalize() {
        bool all = true;
        min_margin = std::numeric_limits<long double>::infinity();
        witness.clear();
        for (const auto& r : rows) {
            if (witness.empty() || r.margin < min_margin || std::isnan(r.margin)) {
                if (!std::isnan(min_margin)) {
                    min_margin = r.margin;
                    witness = r.point_id;
                }
            }
            if (!r.ok) all = false;
        }
        status = !hypotheses_ok() ? CertStatus::HypothesisViolated : (all ? CertStatus::Pass : CertStatus::Fail);
    }
};

inline bool deterministic_ok(long double margin, long double bound) {
    if (std::isnan(margin)) return false;
    return margin >= -static_cast<long double>(kCertificateSlack) * std::max(1.0L, std::fabs(bound));
}

// ---------------------------------------------------------------------------
// Shared hypothesis checks

/// factor·‖Df‖ <= φ on every triple.
template <class C>
HypothesisCheck defect_check(const C& c, const SampledFunction<C>& f, const ControlFunction& phi,
                             const std::vector<Triple<C>>& triples, long double factor = 1.0L) {
    HypothesisCheck h{"defect bounded by control", true, ""};
    long double worst = 0.0L;
    for (const auto& t : triples) {
        const long double d = factor * c.norm(defect(c, f, t.x, t.y, t.z));
        const long double w = control_eval(c, phi, t.x, t.y, t.z);
        if (d > w * (1.0L + kControlRelTol)) {
            const long double ex = d - w;
            if (h.ok || ex > worst) {
                worst = ex;
                h.detail = "at (" + c.describe(t.x) + ", " + c.describe(t.y) + ", " + c.describe(t.z) +
                           "): defect " + format_real(d) + " > " + format_real(w);
            }
            h.ok = false;
        }
    }
    if (h.ok) h.detail = std::to_string(triples.size()) + " triples";
    return h;
}

/// φ(s·x, s·y, s·z) <= k·φ(x,y,z) with s = 1/2 (Downscale) or 2 (Upscale).
template <class C>
HypothesisCheck scaling_check(const C& c, const ControlFunction& phi, const std::vector<Triple<C>>& triples,
                              Direction arg, long double k, std::string name) {
    HypothesisCheck h{std::move(name), true, ""};
    for (const auto& t : triples) {
        auto s = [&](const typename C::Point& p) { return arg == Direction::Downscale ? c.half(p) : c.twice(p); };
        const long double lhs = control_eval(c, phi, s(t.x), s(t.y), s(t.z));
        const long double rhs = k * control_eval(c, phi, t.x, t.y, t.z);
        if (lhs > rhs * (1.0L + kControlRelTol) + std::numeric_limits<long double>::min()) {
            h.ok = false;
            h.detail = "at (" + c.describe(t.x) + ", " + c.describe(t.y) + ", " + c.describe(t.z) + "): " +
                       format_real(lhs) + " > " + format_real(rhs);
            return h;
        }
    }
    h.detail = "k=" + format_real(k);
    return h;
}

template <class C>
HypothesisCheck origin_check(const C& c, const SampledFunction<C>& f) {
    const auto v = f(c.zero());
    return {"f(0) = 0", c.is_zero(v), c.is_zero(v) ? "" : "f(0) = " + c.describe(v)};
}

inline HypothesisCheck range_check(std::string name, bool ok, long double value) {
    return {std::move(name), ok, "value " + format_real(value)};
}

inline HypothesisCheck family_check(const ControlFunction& phi, ControlFamily want) {
    return {"control family is " + to_string(want), phi.family == want, "got " + to_string(phi.family)};
}

template <class C>
void deterministic_rows(Certificate& cert, const C& c, const ExtractionResult<C>& ex,
                        const std::function<long double(const typename C::Point&)>& bound) {
    for (const auto& p : ex.points) {
        CertRow row;
        row.point_id = p.id;
        row.error = p.error;
        row.error_text = p.error_text;
        row.bound = bound(p.x);
        row.margin = row.bound - row.error;
        if (std::isinf(row.bound) && row.bound > 0) row.margin = std::numeric_limits<long double>::infinity();
        row.converged = p.converged;
        row.iterations = p.iterations;
        row.ok = deterministic_ok(row.margin, row.bound);
        cert.rows.push_back(std::move(row));
    }
    (void)c;
}

// ---------------------------------------------------------------------------
// Non-Archimedean, fixed point

struct NonArchInput {
    const PadicCarrier& c;
    const SampledFunction<PadicCarrier>& f;
    const ExtractionResult<PadicCarrier>& ex;
    ControlFunction phi;
    std::vector<Triple<PadicCarrier>> triples;
    bool corollary = false;
    int depth = 40;  // truncation of the running max
};

inline Certificate check_nonarch_fp(const NonArchInput& in, long double alpha, Direction dir) {
    Certificate cert;
    cert.theorem_id = dir == Direction::Downscale ? "NA-FP-down" : "NA-FP-up";
    cert.variant = in.corollary ? "corollary" : "theorem";
    cert.setting = "nonarchimedean";
    const auto& c = in.c;
    const long double two = c.two();
    cert.require("|2| < 1", two < 1.0L, "|2| = " + format_real(two));
    cert.hypotheses.push_back(origin_check(c, in.f));
    cert.hypotheses.push_back(defect_check(c, in.f, in.phi, in.triples));
    cert.hypotheses.push_back(range_check("alpha < 1", alpha < 1.0L, alpha));
    if (dir == Direction::Downscale)
        cert.hypotheses.push_back(scaling_check(c, in.phi, in.triples, Direction::Downscale, alpha / two,
                                                "phi(x/2,y/2,z/2) <= alpha*phi(x,y,z)/|2|"));
    else
        cert.hypotheses.push_back(scaling_check(c, in.phi, in.triples, Direction::Upscale, two * alpha,
                                                "phi(2x,2y,2z) <= |2|*alpha*phi(x,y,z)"));

    std::function<long double(const PAdicNumber&)> bound;
    if (!in.corollary) {
        const ControlFunction phi = in.phi;
        if (dir == Direction::Downscale)
            bound = [c, phi, alpha, two](const PAdicNumber& x) {
                return alpha * control_diag(c, phi, x) / (two - two * alpha);
            };
        else
            bound = [c, phi, alpha, two](const PAdicNumber& x) {
                return control_diag(c, phi, x) / (two - two * alpha);
            };
    } else {
        cert.hypotheses.push_back(family_check(in.phi, ControlFamily::PowerSum));
        const long double r = in.phi.r, theta = in.phi.coefficient;
        const long double tr = std::pow(two, r);
        if (dir == Direction::Downscale) {
            cert.hypotheses.push_back(range_check("0 < r < 1", r > 0 && r < 1, r));
            cert.hypotheses.push_back(
                range_check("alpha = |2|^(1-r)", std::fabs(alpha - std::pow(two, 1 - r)) <= 1e-15L, alpha));
            bound = [c, r, theta, two, tr](const PAdicNumber& x) {
                const long double n = c.norm(x);
                const long double nr = n == 0 ? 0.0L : std::pow(n, r);
                return two * theta * (2 + tr) * nr / (std::pow(two, r + 1) - two * two);
            };
        } else {
            cert.hypotheses.push_back(range_check("r > 1", r > 1, r));
            cert.hypotheses.push_back(
                range_check("alpha = |2|^(r-1)", std::fabs(alpha - std::pow(two, r - 1)) <= 1e-15L, alpha));
            bound = [c, r, theta, two, tr](const PAdicNumber& x) {
                const long double n = c.norm(x);
                const long double nr = n == 0 ? 0.0L : std::pow(n, r);
                return theta * (2 + tr) * nr / (two - tr);
            };
        }
    }
    deterministic_rows(cert, c, in.ex, bound);
    cert.finalize();
    return cert;
}

// ---------------------------------------------------------------------------
// Non-Archimedean, direct

inline Certificate check_nonarch_direct(const NonArchInput& in, Direction dir) {
    Certificate cert;
    cert.theorem_id = dir == Direction::Downscale ? "NA-D-down" : "NA-D-up";
    cert.variant = in.corollary ? "corollary" : "theorem";
    cert.setting = "nonarchimedean";
    const auto& c = in.c;
    const long double two = c.two();
    cert.require("|2| < 1", two < 1.0L, "|2| = " + format_real(two));
    cert.hypotheses.push_back(origin_check(c, in.f));
    cert.hypotheses.push_back(defect_check(c, in.f, in.phi, in.triples));

    // lim |2|^n ζ(x/2^n, y/2^n, z/2^n) = 0, or lim ζ(2^n x, ...)/|2|^n = 0.
    {
        HypothesisCheck h{dir == Direction::Downscale ? "lim |2|^n zeta(x/2^n,y/2^n,z/2^n) = 0"
                                                     : "lim zeta(2^n x,2^n y,2^n z)/|2|^n = 0",
                          true, ""};
        for (const auto& t : in.triples) {
            auto x = t.x, y = t.y, z = t.z;
            const long double first = control_eval(c, in.phi, x, y, z);
            long double w = 1.0L;
            for (int n = 0; n < in.depth; ++n) {
                if (dir == Direction::Downscale) {
                    x = c.half(x), y = c.half(y), z = c.half(z);
                    w *= two;
                } else {
                    x = c.twice(x), y = c.twice(y), z = c.twice(z);
                    w /= two;
                }
            }
            const long double last = w * control_eval(c, in.phi, x, y, z);
            if (!(last <= kLimitFraction * first)) {
                h.ok = false;
                h.detail = "at (" + c.describe(t.x) + ", " + c.describe(t.y) + ", " + c.describe(t.z) + "): term " +
                           format_real(last) + " after " + std::to_string(in.depth) + " steps";
                break;
            }
        }
        cert.hypotheses.push_back(h);
    }

    std::vector<PoundsResult> pounds;
    bool settled = true;
    std::string unsettled;
    for (const auto& p : in.ex.points) {
        pounds.push_back(dir == Direction::Downscale ? bound_pounds_down(c, in.phi, p.x, in.depth)
                                                     : bound_pounds_up(c, in.phi, p.x, in.depth));
        if (!pounds.back().settled && settled) {
            settled = false;
            unsettled = p.id;
        }
    }
    cert.require("running max settles within depth", settled, settled ? "" : "at " + unsettled);

    std::function<long double(const PAdicNumber&)> bound;
    if (!in.corollary) {
        const auto ex = &in.ex;
        bound = [ex, &pounds, dir, two, &c](const PAdicNumber& x) {
            for (std::size_t i = 0; i < ex->points.size(); ++i)
                if (c.same(ex->points[i].x, x))
                    return dir == Direction::Downscale ? pounds[i].value : pounds[i].value / two;
            return std::numeric_limits<long double>::quiet_NaN();
        };
        deterministic_rows(cert, c, in.ex, bound);
    } else {
        std::vector<long double> ts;
        for (int k = -in.depth; k <= in.depth; ++k) ts.push_back(std::pow(2.0L, k));
        const ControlFunction phi = in.phi;
        std::string why;
        if (dir == Direction::Downscale) {
            cert.hypotheses.push_back(family_check(phi, ControlFamily::XiSum));
            const bool ok = xi_sum_hypothesis(phi, two, ts, &why);
            cert.require("xi(t/|2|) <= xi(1/|2|)xi(t), xi(1/|2|) < 1/|2|", ok, why);
            bound = [c, phi, two](const PAdicNumber& x) {
                return phi.coefficient * (2 + two) * phi.xi(c.norm(x)) / two;
            };
            cert.notes.push_back("bound read as kappa*(2+|2|)*xi(|x|)/|2|");
        } else {
            cert.hypotheses.push_back(family_check(phi, ControlFamily::XiProduct));
            const bool ok = xi_product_hypothesis(phi, two, ts, &why);
            cert.require("xi(|2|t) <= xi(|2|)xi(t), xi(|2|) < |2|", ok, why);
            bound = [c, phi](const PAdicNumber& x) {
                const long double v = phi.xi(c.norm(x));
                return phi.coefficient * v * v * v;
            };
        }
        deterministic_rows(cert, c, in.ex, bound);
    }
    cert.notes.push_back("uniqueness certified at depth " + std::to_string(in.depth) + " only");
    cert.finalize();
    return cert;
}

// ---------------------------------------------------------------------------
// Random and fuzzy settings on R^d

struct RealInput {
    const RealCarrier& c;
    const SampledFunction<RealCarrier>& f;
    const ExtractionResult<RealCarrier>& ex;
    ControlFunction phi;
    std::vector<Triple<RealCarrier>> triples;
    bool corollary = false;
    std::vector<double> t_grid;
    FuzzyNorm fuzzy{};
};

/// RHS(t) = k·t / (k·t + K(x)); the inequality LHS >= RHS then reads e <= K/k.
struct RationalRhs {
    long double k = 1.0L;
    std::function<long double(const RealVec&)> K;
};

template <class Lhs>
void graded_rows(Certificate& cert, const RealInput& in, const RationalRhs& rhs, Lhs lhs) {
    for (const auto& p : in.ex.points) {
        CertRow row;
        row.point_id = p.id;
        row.error = p.error;
        row.error_text = p.error_text;
        const long double K = rhs.K(p.x);
        row.bound = rhs.k > 0 ? K / rhs.k : std::numeric_limits<long double>::quiet_NaN();
        row.converged = p.converged;
        row.iterations = p.iterations;
        row.margin = std::numeric_limits<long double>::infinity();
        for (double t : in.t_grid) {
            const long double kt = rhs.k * t;
            const long double r = kt / (kt + K);
            const long double m = static_cast<long double>(lhs(static_cast<double>(p.error), t)) - r;
            if (std::isnan(m) || m < row.margin) {
                row.margin = m;
                row.t_witness = t;
                if (std::isnan(m)) break;
            }
        }
        row.ok = !std::isnan(row.margin) && row.margin >= -static_cast<long double>(kCertificateSlack);
        cert.rows.push_back(std::move(row));
    }
}

inline long double pow_norm(const RealVec& x, long double e) {
    const long double n = x.norm();
    return n == 0 ? 0.0L : std::pow(n, e);
}

inline Certificate check_rn(const RealInput& in, const std::string& id) {
    Certificate cert;
    cert.theorem_id = id;
    cert.variant = in.corollary ? "corollary" : "theorem";
    cert.setting = "random";
    const auto& c = in.c;
    const Direction dir = theorem_direction(id);
    const bool fp = theorem_is_fixed_point(id);
    const long double e = in.phi.scaling_exponent();
    const ControlFunction phi = in.phi;
    cert.hypotheses.push_back(origin_check(c, in.f));
    cert.hypotheses.push_back(defect_check(c, in.f, in.phi, in.triples));
    if (in.t_grid.empty() || in.t_grid.front() <= 0) cert.require("t-grid positive", false);

    RationalRhs rhs;
    if (dir == Direction::Downscale) {
        const long double alpha = std::pow(2.0L, -e);
        cert.hypotheses.push_back(range_check("0 < alpha < 1/2", alpha > 0 && alpha < 0.5L, alpha));
        cert.hypotheses.push_back(
            scaling_check(c, phi, in.triples, Direction::Downscale, alpha, "phi(x/2,y/2,z/2) <= alpha*phi(x,y,z)"));
        if (fp) cert.hypotheses.push_back(range_check("Lipschitz 2*alpha < 1", 2 * alpha < 1, 2 * alpha));
        rhs.k = (1 - 2 * alpha) / alpha;
        rhs.K = [c, phi](const RealVec& x) { return control_diag(c, phi, x); };
    } else {
        const long double alpha = std::pow(2.0L, e);
        cert.hypotheses.push_back(range_check("0 < alpha < 2", alpha > 0 && alpha < 2, alpha));
        cert.hypotheses.push_back(
            scaling_check(c, phi, in.triples, Direction::Upscale, alpha, "phi(2x,2y,2z) <= alpha*phi(x,y,z)"));
        if (fp) cert.hypotheses.push_back(range_check("Lipschitz alpha/2 < 1", alpha / 2 < 1, alpha / 2));
        rhs.k = 2 - alpha;
        rhs.K = [c, phi](const RealVec& x) { return control_diag(c, phi, x); };
    }
    if (in.corollary) {
        cert.hypotheses.push_back(family_check(phi, ControlFamily::PowerSum));
        const long double r = phi.r, theta = phi.coefficient, tr = std::pow(2.0L, r);
        if (dir == Direction::Downscale) {
            cert.hypotheses.push_back(range_check("r > 1", r > 1, r));
            rhs.k = tr - 2;
        } else {
            cert.hypotheses.push_back(range_check("0 < r < 1", r > 0 && r < 1, r));
            rhs.k = 2 - tr;
        }
        rhs.K = [r, theta, tr](const RealVec& x) { return (tr + 2) * theta * pow_norm(x, r); };
        cert.notes.push_back("exponent of the anchor distribution read as r");
    }
    graded_rows(cert, in, rhs, [](double err, double t) { return DistributionFunction::induced(err)(t); });
    cert.finalize();
    return cert;
}

inline Certificate check_fuzzy(const RealInput& in, const std::string& id) {
    Certificate cert;
    cert.theorem_id = id;
    cert.variant = in.corollary ? "corollary" : "theorem";
    cert.setting = "fuzzy";
    const auto& c = in.c;
    const Direction dir = theorem_direction(id);
    const bool fp = theorem_is_fixed_point(id);
    const long double e = in.phi.scaling_exponent();
    const ControlFunction phi = in.phi;
    const FuzzyNorm N = in.fuzzy;
    cert.hypotheses.push_back(origin_check(c, in.f));
    if (in.t_grid.empty() || in.t_grid.front() <= 0) cert.require("t-grid positive", false);

    RationalRhs rhs;
    if (!fp) {
        // N(Df,t) >= N'(φ,t) with N' = N reads ‖Df‖ <= φ.
        cert.hypotheses.push_back(defect_check(c, in.f, phi, in.triples));
        if (dir == Direction::Downscale) {
            long double r = std::pow(2.0L, -e);
            if (in.corollary) {
                r = 0.25L;
                cert.hypotheses.push_back(family_check(phi, ControlFamily::PowerSum));
                cert.hypotheses.push_back(range_check("0 < p < 2", phi.r > 0 && phi.r < 2, phi.r));
            }
            cert.hypotheses.push_back(range_check("0 < |r| < 1/2", r > 0 && r < 0.5L, r));
            cert.hypotheses.push_back(
                scaling_check(c, phi, in.triples, Direction::Downscale, r, "phi(x/2,y/2,z/2) <= |r|*phi(x,y,z)"));
            rhs.k = N.alpha;
            if (!in.corollary) {
                rhs.K = [c, phi, r, N](const RealVec& x) { return N.beta * r * control_diag(c, phi, x) / (1 - 2 * r); };
            } else {
                const long double p = phi.r, theta = phi.coefficient;
                rhs.K = [p, theta, N](const RealVec& x) {
                    return N.beta * (std::pow(2.0L, p) + 2) * theta * pow_norm(x, p) / 2;
                };
                cert.notes.push_back("(2^r+2) read as (2^p+2)");
            }
        } else {
            long double r = std::pow(2.0L, e);
            if (in.corollary) {
                r = 1.0L;
                cert.hypotheses.push_back(family_check(phi, ControlFamily::PowerProduct));
                cert.hypotheses.push_back(range_check("0 < p1+p2+p3 < 2", e > 0 && e < 2, e));
            }
            cert.hypotheses.push_back(range_check("0 < |r| < 2", r > 0 && r < 2, r));
            cert.hypotheses.push_back(
                scaling_check(c, phi, in.triples, Direction::Upscale, r, "phi(2x,2y,2z) <= |r|*phi(x,y,z)"));
            rhs.k = N.alpha;
            if (!in.corollary) {
                rhs.K = [c, phi, r, N](const RealVec& x) { return N.beta * control_diag(c, phi, x) / (2 - r); };
            } else {
                const long double theta = phi.coefficient;
                rhs.K = [e, theta, N](const RealVec& x) {
                    return N.beta * (std::pow(2.0L, e) + 2) * theta * pow_norm(x, e);
                };
                cert.notes.push_back("(2^r+2) read as (2^p+2) with p = p1+p2+p3");
            }
        }
    } else {
        // N(Df,t) >= t/(t+φ) reads (β/α)‖Df‖ <= φ.
        cert.hypotheses.push_back(defect_check(c, in.f, phi, in.triples, N.beta / N.alpha));
        long double L;
        if (dir == Direction::Downscale) {
            L = std::pow(2.0L, 1 - e);
            cert.hypotheses.push_back(range_check("L < 1", L < 1, L));
            cert.hypotheses.push_back(
                scaling_check(c, phi, in.triples, Direction::Downscale, L / 2, "phi(x/2,y/2,z/2) <= L*phi(x,y,z)/2"));
        } else {
            L = std::pow(2.0L, e - 1);
            cert.hypotheses.push_back(range_check("L < 1", L < 1, L));
            cert.hypotheses.push_back(
                scaling_check(c, phi, in.triples, Direction::Upscale, 2 * L, "phi(2x,2y,2z) <= 2L*phi(x,y,z)"));
        }
        // αt/(αt+βe) >= k t/(k t + K) ⇔ e <= (α/β) K/k; fold α/β into K.
        const long double scale = N.alpha / N.beta;
        if (!in.corollary) {
            rhs.k = 2 - 2 * L;
            if (dir == Direction::Downscale)
                rhs.K = [c, phi, L, scale](const RealVec& x) { return L * control_diag(c, phi, x) / scale; };
            else
                rhs.K = [c, phi, scale](const RealVec& x) { return control_diag(c, phi, x) / scale; };
        } else if (dir == Direction::Downscale) {
            cert.hypotheses.push_back(family_check(phi, ControlFamily::PowerSum));
            const long double p = phi.r, theta = phi.coefficient;
            cert.hypotheses.push_back(range_check("p > 1", p > 1, p));
            rhs.k = std::pow(2.0L, p + 1) - 2;
            rhs.K = [p, theta, scale](const RealVec& x) { return (std::pow(2.0L, p) + 2) * theta * pow_norm(x, p) / scale; };
            cert.notes.push_back("contraction uses L = 2^(1-p); the corollary formula is checked as stated");
        } else {
            cert.hypotheses.push_back(family_check(phi, ControlFamily::PowerProduct));
            const long double p = phi.p[0], theta = phi.coefficient;
            cert.require("p1 = p2 = p3", phi.p[0] == phi.p[1] && phi.p[1] == phi.p[2]);
            cert.hypotheses.push_back(range_check("0 < p < 1/3", p > 0 && p < 1.0L / 3, p));
            rhs.k = std::pow(2.0L, 1 + 3 * p) - 2;
            rhs.K = [p, theta, scale](const RealVec& x) {
                return std::pow(2.0L, 3 * p) * theta * pow_norm(x, 3 * p) / scale;
            };
            cert.notes.push_back("contraction uses L = 2^(3p-1); the corollary formula is checked as stated");
        }
    }
    graded_rows(cert, in, rhs, [N](double err, double t) { return N(err, t); });
    cert.finalize();
    return cert;
}

// ---------------------------------------------------------------------------
// Classical

inline Certificate check_classical_rassias(const RealCarrier& c, const SampledFunction<RealCarrier>& f,
                                           const ExtractionResult<RealCarrier>& L, long double eps, double p) {
    Certificate cert;
    cert.theorem_id = "CL-RASSIAS";
    cert.setting = "classical";
    cert.require("0 <= p < 1", p >= 0 && p < 1, "p = " + format_real(p));
    auto pw = [p](long double n) -> long double { return p == 0 ? 1.0L : (n == 0 ? 0.0L : std::pow(n, (long double)p)); };
    {
        HypothesisCheck h{"Cauchy defect <= eps(|x|^p + |y|^p)", true, ""};
        for (const auto& x : f.grid.points)
            for (const auto& y : f.grid.points) {
                const long double d = c.norm(c.sub(f(c.add(x, y)), c.add(f(x), f(y))));
                const long double w = eps * (pw(c.norm(x)) + pw(c.norm(y)));
                if (d > w * (1.0L + kControlRelTol)) {
                    h.ok = false;
                    h.detail = "at (" + c.describe(x) + ", " + c.describe(y) + ")";
                }
            }
        cert.hypotheses.push_back(h);
    }
    const long double denom = 2.0L - std::pow(2.0L, (long double)p);
    deterministic_rows<RealCarrier>(cert, c, L, [&](const RealVec& x) { return 2 * eps * pw(c.norm(x)) / denom; });
    cert.finalize();
    return cert;
}

// ---------------------------------------------------------------------------
// Cross-setting consistency

struct ConsistencyReport {
    std::size_t samples = 0;
    std::size_t mismatches = 0;
    std::string witness;
    bool ok() const { return mismatches == 0; }
};

/// On R, μ_e(t) = t/(t+e) and N(e,t) with α=β=1 must agree bit for bit, and
/// both verdicts must equal e <= B.
inline ConsistencyReport cross_setting_check(const std::vector<double>& errors, const std::vector<double>& radii,
                                             const std::vector<double>& t_grid) {
    ConsistencyReport rep;
    const FuzzyNorm N(1.0, 1.0);
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const double e = errors[i], B = radii[i];
        bool rn_all = true, fz_all = true;
        for (double t : t_grid) {
            ++rep.samples;
            const double rl = DistributionFunction::induced(e)(t), rr = DistributionFunction::induced(B)(t);
            const double fl = N(e, t), fr = N(B, t);
            if (rl != fl || rr != fr) {
                ++rep.mismatches;
                rep.witness = "value mismatch at point " + std::to_string(i);
            }
            rn_all = rn_all && rl >= rr;
            fz_all = fz_all && fl >= fr;
        }
        if (rn_all != fz_all || rn_all != (e <= B)) {
            ++rep.mismatches;
            rep.witness = "verdict mismatch at point " + std::to_string(i);
        }
    }
    return rep;
}

}  // namespace cjlab
