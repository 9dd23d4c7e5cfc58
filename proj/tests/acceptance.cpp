// Acceptance run: one [PASS]/[FAIL] line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <thread>

#include "cjlab/experiment.hpp"

using namespace cjlab;

namespace {

// Pinned thresholds.
constexpr int kArithSamples = 10000;
constexpr int kMinRoundTripValuation = 56;
constexpr double kArithSeconds = 5.0;
constexpr double kExtractTol = 1e-8;
constexpr double kAdditivityTol = 1e-8;
constexpr double kExtractSeconds = 1.0;
constexpr double kAgreeTol = 1e-9;
constexpr std::size_t kMinMatrix = 12;
constexpr std::size_t kRnPoints = 20;
constexpr int kRnTimes = 100;
constexpr double kMatrixSeconds = 60.0;
constexpr std::uint64_t kSeed = 20261014;

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
    std::printf("[%s] %d. %s | %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ExperimentConfig find(const std::vector<ExperimentConfig>& m, const std::string& name) {
    for (const auto& c : m)
        if (c.name == name) return c;
    throw std::runtime_error("missing matrix config " + name);
}

const RunOutcome& find(const std::vector<RunOutcome>& m, const std::string& name) {
    for (const auto& o : m)
        if (o.name == name) return o;
    throw std::runtime_error("missing matrix outcome " + name);
}

const Certificate* cert_of(const RunOutcome& o, const std::string& id) {
    for (const auto& c : o.certificates)
        if (c.theorem_id == id) return &c;
    return nullptr;
}

// 1 ---------------------------------------------------------------------------
void criterion_arithmetic() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<std::int64_t> num(-1000000, 1000000), den(1, 1000000);
    std::uniform_int_distribution<int> shift(-6, 6);
    long bad_mul = 0, bad_ultra = 0, bad_eq = 0, bad_round = 0, checked = 0;
    int worst_round = std::numeric_limits<int>::max();
    for (int p : {2, 3}) {
        auto draw = [&] {
            std::int64_t a = num(rng);
            if (a == 0) a = 1;
            const auto scale = PAdicNumber::power_of_prime(p, shift(rng), 64);
            return PAdicNumber::from_rational(a, den(rng), p, 64) * scale;
        };
        for (int i = 0; i < kArithSamples; ++i) {
            const auto x = draw(), y = draw(), z = draw();
            ++checked;
            if ((x * y).norm() != x.norm() * y.norm()) ++bad_mul;
            for (const auto& [a, b] : {std::pair{x, y}, std::pair{y, z}}) {
                const auto s = (a + b).norm();
                const auto m = std::max(a.norm(), b.norm());
                if (s > m) ++bad_ultra;
                if (a.norm() != b.norm() && s != m) ++bad_eq;
            }
            const std::int64_t a = num(rng), b = den(rng);
            const auto r = PAdicNumber::from_rational(a, b, p, 64) * PAdicNumber::from_integer(b, p, 64) -
                           PAdicNumber::from_integer(a, p, 64);
            if (!r.is_zero()) {
                worst_round = std::min(worst_round, r.valuation());
                if (r.valuation() < kMinRoundTripValuation) ++bad_round;
            }
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = !bad_mul && !bad_ultra && !bad_eq && !bad_round && secs < kArithSeconds;
    report(1, "p-adic arithmetic suite", ok,
           std::to_string(checked) + " triples in Q_2,Q_3; mul " + std::to_string(bad_mul) + " ultra " +
               std::to_string(bad_ultra) + " eq " + std::to_string(bad_eq) + " roundtrip " +
               std::to_string(bad_round) + " (min residual valuation " +
               (worst_round == std::numeric_limits<int>::max() ? std::string("exact") : std::to_string(worst_round)) +
               "); " + fmt(secs) + " s");
}

// 2 ---------------------------------------------------------------------------
void criterion_classical_extraction() {
    const auto t0 = std::chrono::steady_clock::now();
    const RealCarrier R;
    const auto grid = real_grid(R, {1, 3, 5}, 3, 40);
    const auto f = make_perturbed(R, 1.0, Perturbation::power(0.1, 0.5), grid);
    const auto ex = extract(R, f, Direction::Upscale, 40);
    double worst = 0;
    std::string at;
    for (const auto& p : ex.points) {
        const double d = std::fabs(p.A[0] - p.x[0]);
        if (d > worst) worst = d, at = p.id;
    }
    const auto add = additivity_residual(R, ex, kAdditivityTol);
    const double secs = seconds_since(t0);
    const bool ok = grid.size() == 25 && worst <= kExtractTol && add.ok && secs < kExtractSeconds;
    report(2, "classical extraction (upscale, n_max=40)", ok,
           std::to_string(grid.size()) + " points; max |A(x)-x| " + fmt(worst) + " at " + at + " (tol " +
               fmt(kExtractTol) + "); additivity residual " + fmt(static_cast<double>(add.max_residual)) + "; " +
               fmt(secs) + " s");
}

// 3 ---------------------------------------------------------------------------
void criterion_rassias() {
    const RealCarrier R;
    const auto grid = real_grid(R, {1, 3, 5}, 3, 40);
    bool ok = true;
    std::string detail;
    for (double p : {0.0, 0.25, 0.5, 0.75}) {
        const auto f = make_perturbed(R, 1.0, Perturbation::power(0.1, p), grid);
        // Brute-force oracle for ε over all grid pairs.
        auto pw = [p](double t) { return p == 0 ? 1.0 : (t == 0 ? 0.0 : std::pow(std::fabs(t), p)); };
        auto g = [&](double t) { return t + 0.1 * pw(t); };
        double eps = 0;
        for (const auto& x : grid.points)
            for (const auto& y : grid.points) {
                const double w = pw(x[0]) + pw(y[0]);
                if (w > 0) eps = std::max(eps, std::fabs(g(x[0] + y[0]) - g(x[0]) - g(y[0])) / w);
            }
        const auto lib = fit_cauchy_epsilon(R, f, p, grid.points);
        const auto ex = extract(R, f, Direction::Upscale, 40);
        const auto cert = check_classical_rassias(R, f, ex, std::max<long double>(eps, lib), p);
        const bool here = cert.pass() && cert.min_margin >= 0 && std::fabs(static_cast<double>(lib) - eps) <= 1e-12 * eps;
        ok = ok && here;
        detail += "p=" + fmt(p) + ": eps " + fmt(eps) + " min margin " + fmt(static_cast<double>(cert.min_margin)) + "; ";
    }
    report(3, "classical Rassias bound", ok, detail);
}

// 4 ---------------------------------------------------------------------------
void criterion_nonarch_direct() {
    const PadicCarrier P;
    const auto grid = padic_grid(P, {{1, 1}, {3, 1}, {1, 3}, {5, 1}}, 2, 64);
    bool ok = true;
    std::string detail;
    {
        const auto f = make_perturbed(P, P.rational(1), Perturbation::valuation_shift(1, 1, 3, 0), grid);
        const auto triples = standard_triples(P, grid, 64, 0);
        const auto fit = fit_theta(P, f, ControlFunction::power_sum(1, 0.5), triples);
        const auto ex = extract(P, f, Direction::Downscale, 64);
        std::size_t inc = 0;
        for (const auto& p : ex.points) inc += valuations_strictly_increase(p);
        const auto cert = check_nonarch_direct({P, f, ex, fit.fitted, triples, false, 40}, Direction::Downscale);
        ok = ok && inc == ex.points.size() && cert.pass();
        detail += "downscale: increasing " + std::to_string(inc) + "/" + std::to_string(ex.points.size()) +
                  ", f-A <= pounds " + to_string(cert.status) + "; ";
    }
    {
        const auto f = make_perturbed(P, P.rational(1), Perturbation::valuation_shift(1, 1, 0, 2), grid);
        const auto triples = standard_triples(P, grid, 0, 64);
        const auto fit = fit_theta(P, f, ControlFunction::power_sum(1, 2), triples);
        const auto ex = extract(P, f, Direction::Upscale, 64);
        std::size_t inc = 0;
        for (const auto& p : ex.points) inc += valuations_strictly_increase(p);
        const auto cert = check_nonarch_direct({P, f, ex, fit.fitted, triples, false, 40}, Direction::Upscale);
        ok = ok && inc == ex.points.size() && cert.pass();
        detail += "upscale: increasing " + std::to_string(inc) + "/" + std::to_string(ex.points.size()) +
                  ", f-A <= pounds/|2| " + to_string(cert.status);
    }
    report(4, "non-Archimedean direct method", ok, detail);
}

// 5, 6 -------------------------------------------------------------------------
void criterion_agreement(const std::vector<ExperimentConfig>& cfgs, const std::vector<RunOutcome>& outs) {
    bool settings[4] = {false, false, false, false};
    std::size_t agree = 0, both = 0;
    double worst = 0;
    std::string bad;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        settings[static_cast<int>(cfgs[i].setting)] = true;
        if (!outs[i].body.contains("agreement")) continue;
        ++both;
        const auto& a = outs[i].body["agreement"];
        if (a.contains("max_distance")) worst = std::max(worst, a["max_distance"].get<double>());
        if (a["ok"].get<bool>()) ++agree;
        else bad += cfgs[i].name + " ";
    }
    const bool all_settings = settings[0] && settings[1] && settings[2] && settings[3];
    const bool ok = outs.size() >= kMinMatrix && all_settings && both == outs.size() && agree == both &&
                    worst <= kAgreeTol;
    report(5, "method agreement across the default matrix", ok,
           std::to_string(agree) + "/" + std::to_string(both) + " configs agree (" + std::to_string(outs.size()) +
               " configs, 4 settings " + (all_settings ? "covered" : "missing") + "); max classical distance " +
               fmt(worst) + (bad.empty() ? "" : "; failing " + bad));
}

void criterion_contract(const std::vector<ExperimentConfig>& cfgs, const std::vector<RunOutcome>& outs) {
    std::size_t ok_n = 0, n = 0;
    double worst_excess = -1e300, worst_apriori = 0;
    std::string bad;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        if (!outs[i].body.contains("fixed_point")) continue;
        ++n;
        const auto& fp = outs[i].body["fixed_point"];
        const bool decay = fp["decay_ok"].get<bool>(), apriori = fp["apriori_ok"].get<bool>();
        if (fp["max_decay_ratio"].is_number() && fp["lipschitz"].is_number())
            worst_excess =
                std::max(worst_excess, fp["max_decay_ratio"].get<double>() - fp["lipschitz"].get<double>());
        if (fp["max_error_ratio"].is_number() && fp["radius"].is_number() && fp["radius"].get<double>() > 0)
            worst_apriori = std::max(worst_apriori, fp["max_error_ratio"].get<double>() / fp["radius"].get<double>());
        if (decay && apriori) ++ok_n;
        else bad += cfgs[i].name + " ";
    }
    report(6, "fixed-point contract (decay ratio, a-priori radius)", n > 0 && ok_n == n,
           std::to_string(ok_n) + "/" + std::to_string(n) + " configs; max(decay ratio - L) " + fmt(worst_excess) +
               " (slack " + fmt(kCertificateSlack) + "); max error ratio / radius " + fmt(worst_apriori) +
               (bad.empty() ? "" : "; failing " + bad));
}

// 7 ---------------------------------------------------------------------------
void criterion_rn(const std::vector<RunOutcome>& outs) {
    bool ok = true;
    std::string detail;
    for (const auto& [name, ids] : {std::pair<std::string, std::vector<std::string>>{"rn-square-down", {"RN-D-down", "RN-FP-down"}},
                                    {"rn-root-up", {"RN-D-up", "RN-FP-up"}}}) {
        const auto& o = find(outs, name);
        const auto& cfg = o.body["config"];
        const bool shape = cfg["variant"] == "corollary" && cfg["t_grid"]["count"].get<int>() == kRnTimes &&
                           cfg["control"]["theta"] == "fit";
        for (const auto& id : ids) {
            const auto* c = cert_of(o, id);
            const bool here = c && c->pass() && c->rows.size() == kRnPoints && shape;
            ok = ok && here;
            detail += id + " " + (c ? to_string(c->status) : "missing") + " (" + (c ? std::to_string(c->rows.size()) : "0") +
                      " x-points, min margin " + (c ? fmt(static_cast<double>(c->min_margin)) : "-") + "); ";
        }
        const auto& cs = o.body["cross_setting"];
        ok = ok && cs["ok"].get<bool>();
        detail += "cross-setting " + std::to_string(cs["samples"].get<std::size_t>()) + " samples, " +
                  std::to_string(cs["mismatches"].get<std::size_t>()) + " mismatches; ";
    }
    report(7, "random normed space corollaries", ok, detail);
}

// 8 ---------------------------------------------------------------------------
void criterion_fuzzy(const std::vector<ExperimentConfig>& cfgs, const std::vector<RunOutcome>& outs) {
    bool ok = true;
    std::string detail;
    for (const auto& [name, id] : {std::pair<std::string, std::string>{"fuzzy-square-down", "FZ-D-down"},
                                   {"fuzzy-square-down", "FZ-FP-down"},
                                   {"fuzzy-root-up", "FZ-D-up"},
                                   {"fuzzy-root-up", "FZ-FP-up"},
                                   {"fuzzy-power-down-corollary", "FZ-FP-down"},
                                   {"fuzzy-product-up-corollary", "FZ-FP-up"}}) {
        const auto* c = cert_of(find(outs, name), id);
        const bool here = c && c->pass();
        ok = ok && here;
        detail += id + (c && c->variant == "corollary" ? "(cor) " : " ") + (c ? to_string(c->status) : "missing") + "; ";
    }
    // Out-of-hypothesis probes.
    auto na = find(cfgs, "na-square-up-corollary");
    na.name = "probe-na-fp-r1";
    na.control.r = 1.0;
    na.perturbation = Perturbation::valuation_shift(1, 1, 2, 1);
    const auto na_out = run_experiment(na);
    auto fz = find(cfgs, "fuzzy-product-up-corollary");
    fz.name = "probe-fz-p-half";
    fz.control.p[0] = fz.control.p[1] = fz.control.p[2] = 0.5;
    fz.perturbation = Perturbation::power(0.1, 1.5);
    const auto fz_out = run_experiment(fz);
    for (const auto* o : {&na_out, &fz_out}) {
        const auto& c = o->certificates.at(0);
        const bool rejected = c.status == CertStatus::HypothesisViolated && !o->pass;
        ok = ok && rejected;
        detail += "probe " + o->name + " " + to_string(c.status) + "; ";
    }
    report(8, "fuzzy certificates and out-of-hypothesis probes", ok, detail);
}

// 9 ---------------------------------------------------------------------------
void criterion_degenerate() {
    bool ok = true;
    std::size_t certs = 0, rows = 0;
    std::string bad;
    for (const auto& id : theorem_ids()) {
        auto c = base_config("additive-" + id, theorem_setting(id), theorem_direction(id));
        c.perturbation = Perturbation::none();
        c.control = power_sum_spec(theorem_direction(id) == Direction::Downscale ? 2.0 : 0.5);
        if (c.padic()) c.control.r = theorem_direction(id) == Direction::Downscale ? 0.5 : 2.0;
        c.theorems = {id};
        const auto o = run_experiment(c);
        bool here = o.pass && o.body["fit"]["max_defect"] == 0.0;
        for (const char* m : {"direct", "fixed_point"}) {
            const Json& ex = std::string(m) == "direct" ? o.body["direct"] : o.body["fixed_point"]["extraction"];
            for (const auto& p : ex["points"])
                here = here && p["iterations"] == 1 && p["converged"] == true && p["A"] == p["fx"] && p["error"] == 0.0;
        }
        for (const auto& cert : o.certificates) {
            ++certs;
            for (const auto& r : cert.rows) {
                ++rows;
                // With zero error the left side is exact: margin = bound, or 1 - RHS(t) >= 0.
                const bool graded = cert.setting == "random" || cert.setting == "fuzzy";
                here = here && r.error == 0 && (graded ? r.margin >= 0 : r.margin == r.bound);
            }
        }
        if (!here) bad += id + " ";
        ok = ok && here;
    }
    report(9, "degenerate (additive) suite", ok,
           std::to_string(certs) + " certificates, " + std::to_string(rows) + " rows" +
               (bad.empty() ? "" : "; failing " + bad));
}

// 10 --------------------------------------------------------------------------
void criterion_determinism(const std::vector<RunOutcome>& first, const std::vector<RunOutcome>& second, double secs) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const auto a = report_text(first[i], "run-1"), b = report_text(second[i], "run-2");
        if (a.substr(a.find("\"body\"")) == b.substr(b.find("\"body\"")) && summary_text(first[i]) == summary_text(second[i]))
            ++same;
    }
    report(10, "determinism of the default matrix", same == first.size() && secs < kMatrixSeconds,
           std::to_string(same) + "/" + std::to_string(first.size()) +
               " reports byte-identical outside the header (1 vs " +
               std::to_string(std::max(2u, std::thread::hardware_concurrency())) + " jobs); slower run " + fmt(secs) +
               " s");
}

}  // namespace

int main() {
    criterion_arithmetic();
    criterion_classical_extraction();
    criterion_rassias();
    criterion_nonarch_direct();

    auto cfgs = default_matrix();
    for (auto& c : cfgs) c.seed = kSeed;
    auto t0 = std::chrono::steady_clock::now();
    const auto run1 = run_many(cfgs, 1);
    const double s1 = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto run2 = run_many(cfgs, std::max(2u, std::thread::hardware_concurrency()));
    const double s2 = seconds_since(t0);

    criterion_agreement(cfgs, run1);
    criterion_contract(cfgs, run1);
    criterion_rn(run1);
    criterion_fuzzy(cfgs, run1);
    criterion_degenerate();
    criterion_determinism(run1, run2, std::max(s1, s2));

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
