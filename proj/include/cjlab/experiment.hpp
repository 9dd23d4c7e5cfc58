#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cjlab/certify.hpp"

namespace cjlab {

using Json = nlohmann::ordered_json;

inline constexpr int kRealDefaultNmax = 40;
inline constexpr int kPadicDefaultNmax = 64;
inline constexpr int kProbeLevels = 20;
inline constexpr int kPoundsDepth = 40;
inline constexpr double kAgreementTolerance = 1e-9;

struct ControlSpec {
    ControlFamily family = ControlFamily::PowerSum;
    bool fit = true;
    double theta = 1.0;
    double r = 1.0;
    double p[3] = {1.0, 1.0, 1.0};
    double s = 1.0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    SettingKind setting = SettingKind::Classical;
    std::size_t dimension = 1;
    int prime = 2;
    int precision = kDefaultPrecision;
    double fuzzy_alpha = 1.0, fuzzy_beta = 1.0;
    std::string linear = "1";
    Perturbation perturbation;
    ControlSpec control;
    std::string method = "both";  // direct | fixed_point | both
    Direction direction = Direction::Upscale;
    int n_max = 0;  // 0: carrier default
    double tol = kDefaultTolerance;
    std::vector<std::string> seeds{"1", "3", "5"};
    int levels = 3;
    int depth = 0;  // 0: n_max
    bool include_zero = true;
    double t_lo = 1e-6, t_hi = 1e3;
    int t_count = 100;
    std::vector<std::string> theorems;
    std::string variant = "theorem";
    std::optional<double> rassias_p;
    std::uint64_t seed = 42;
    std::string output_dir = "out";

    bool padic() const { return setting == SettingKind::NonArchimedean; }
    int effective_n_max() const { return n_max > 0 ? n_max : (padic() ? kPadicDefaultNmax : kRealDefaultNmax); }
    int effective_depth() const { return depth > 0 ? depth : effective_n_max(); }
    bool run_direct() const { return method == "direct" || method == "both"; }
    bool run_fixed_point() const { return method == "fixed_point" || method == "both"; }
};

// ---------------------------------------------------------------------------
// Parsing

inline std::pair<std::int64_t, std::int64_t> parse_fraction(const std::string& text, const std::string& field) {
    try {
        const auto slash = text.find('/');
        std::size_t used = 0;
        const std::int64_t a = std::stoll(text.substr(0, slash), &used);
        if (used != text.substr(0, slash).size()) throw std::invalid_argument(text);
        std::int64_t b = 1;
        if (slash != std::string::npos) {
            const auto den = text.substr(slash + 1);
            b = std::stoll(den, &used);
            if (used != den.size()) throw std::invalid_argument(text);
        }
        if (b == 0) throw DomainError(field + ": zero denominator in '" + text + "'");
        return {a, b};
    } catch (const std::logic_error&) {
        throw ConfigError(field + ": expected an integer or a/b, got '" + text + "'");
    }
}

inline std::string json_to_token(const Json& v, const std::string& field) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw ConfigError(field + ": expected a number or string");
}

inline double token_to_double(const std::string& t, const std::string& field) {
    if (t.find('/') != std::string::npos) {
        const auto [a, b] = parse_fraction(t, field);
        return static_cast<double>(a) / static_cast<double>(b);
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError(field + ": not a number: '" + t + "'");
    }
}

namespace detail {

template <class T>
T take(const Json& obj, const char* key, const std::string& section, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(section + "." + key + ": wrong type");
    }
}

inline void reject_unknown(const Json& obj, const std::string& section, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(section + ": expected an object");
    for (const auto& [k, v] : obj.items()) {
        bool known = false;
        for (const char* q : keys) known = known || k == q;
        if (!known) throw ConfigError(section + "." + k + ": unknown field");
    }
}

}  // namespace detail

inline SettingKind setting_from_string(const std::string& s) {
    if (s == "classical") return SettingKind::Classical;
    if (s == "nonarchimedean") return SettingKind::NonArchimedean;
    if (s == "random") return SettingKind::Random;
    if (s == "fuzzy") return SettingKind::Fuzzy;
    throw ConfigError("setting.kind: unknown setting '" + s + "'");
}

inline std::string setting_name(SettingKind k) { return std::string(to_string(k)); }

inline ExperimentConfig config_from_json(const Json& j) {
    using detail::take;
    ExperimentConfig c;
    detail::reject_unknown(j, "config",
                           {"name", "setting", "function", "control", "method", "direction", "n_max", "tol", "grid",
                            "t_grid", "theorems", "variant", "rassias_p", "seed", "output"});
    c.name = take<std::string>(j, "name", "config", c.name);
    if (j.contains("setting")) {
        const auto& s = j["setting"];
        detail::reject_unknown(s, "setting", {"kind", "dimension", "prime", "precision", "fuzzy_alpha", "fuzzy_beta"});
        c.setting = setting_from_string(take<std::string>(s, "kind", "setting", "classical"));
        c.dimension = take<std::size_t>(s, "dimension", "setting", 1);
        c.prime = take<int>(s, "prime", "setting", 2);
        c.precision = take<int>(s, "precision", "setting", kDefaultPrecision);
        c.fuzzy_alpha = take<double>(s, "fuzzy_alpha", "setting", 1.0);
        c.fuzzy_beta = take<double>(s, "fuzzy_beta", "setting", 1.0);
    }
    if (j.contains("function")) {
        const auto& f = j["function"];
        detail::reject_unknown(f, "function", {"linear", "perturbation"});
        if (f.contains("linear")) c.linear = json_to_token(f["linear"], "function.linear");
        if (f.contains("perturbation")) {
            const auto& p = f["perturbation"];
            detail::reject_unknown(p, "function.perturbation", {"kind", "epsilon", "r", "c", "m"});
            const auto kind = take<std::string>(p, "kind", "function.perturbation", "none");
            const double r = take<double>(p, "r", "function.perturbation", 0.0);
            if (kind == "none") {
                c.perturbation = Perturbation::none();
            } else if (kind == "power") {
                c.perturbation = Perturbation::power(take<double>(p, "epsilon", "function.perturbation", 0.1), r);
            } else if (kind == "valuation_shift") {
                const auto [a, b] = parse_fraction(
                    p.contains("c") ? json_to_token(p["c"], "function.perturbation.c") : "1", "function.perturbation.c");
                c.perturbation = Perturbation::valuation_shift(a, b, take<int>(p, "m", "function.perturbation", 0), r);
            } else {
                throw ConfigError("function.perturbation.kind: unknown kind '" + kind + "'");
            }
        }
    }
    if (j.contains("control")) {
        const auto& k = j["control"];
        detail::reject_unknown(k, "control", {"family", "theta", "r", "p", "s"});
        c.control.family = control_family_from_string(take<std::string>(k, "family", "control", "power_sum"));
        if (k.contains("theta")) {
            if (k["theta"].is_string()) {
                if (k["theta"].get<std::string>() != "fit") throw ConfigError("control.theta: expected a number or \"fit\"");
                c.control.fit = true;
            } else {
                c.control.fit = false;
                c.control.theta = take<double>(k, "theta", "control", 1.0);
            }
        }
        c.control.r = take<double>(k, "r", "control", c.control.r);
        c.control.s = take<double>(k, "s", "control", c.control.s);
        if (k.contains("p")) {
            const auto p = take<std::vector<double>>(k, "p", "control", {});
            if (p.size() != 3) throw ConfigError("control.p: expected three exponents");
            std::copy(p.begin(), p.end(), c.control.p);
        }
    }
    c.method = take<std::string>(j, "method", "config", c.method);
    if (j.contains("direction")) c.direction = direction_from_string(take<std::string>(j, "direction", "config", ""));
    c.n_max = take<int>(j, "n_max", "config", 0);
    c.tol = take<double>(j, "tol", "config", c.tol);
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        detail::reject_unknown(g, "grid", {"seeds", "levels", "depth", "include_zero"});
        if (g.contains("seeds")) {
            if (!g["seeds"].is_array()) throw ConfigError("grid.seeds: expected an array");
            c.seeds.clear();
            for (const auto& s : g["seeds"]) c.seeds.push_back(json_to_token(s, "grid.seeds"));
        }
        c.levels = take<int>(g, "levels", "grid", c.levels);
        c.depth = take<int>(g, "depth", "grid", 0);
        c.include_zero = take<bool>(g, "include_zero", "grid", c.include_zero);
    }
    if (j.contains("t_grid")) {
        const auto& t = j["t_grid"];
        detail::reject_unknown(t, "t_grid", {"lo", "hi", "count"});
        c.t_lo = take<double>(t, "lo", "t_grid", c.t_lo);
        c.t_hi = take<double>(t, "hi", "t_grid", c.t_hi);
        c.t_count = take<int>(t, "count", "t_grid", c.t_count);
    }
    c.theorems = take<std::vector<std::string>>(j, "theorems", "config", {});
    c.variant = take<std::string>(j, "variant", "config", c.variant);
    if (j.contains("rassias_p")) c.rassias_p = take<double>(j, "rassias_p", "config", 0.0);
    c.seed = take<std::uint64_t>(j, "seed", "config", c.seed);
    if (j.contains("output")) {
        detail::reject_unknown(j["output"], "output", {"dir"});
        c.output_dir = take<std::string>(j["output"], "dir", "output", c.output_dir);
    }
    return c;
}

inline Json control_spec_json(const ControlSpec& k) {
    Json j;
    j["family"] = to_string(k.family);
    if (k.fit)
        j["theta"] = "fit";
    else
        j["theta"] = k.theta;
    j["r"] = k.r;
    j["p"] = {k.p[0], k.p[1], k.p[2]};
    j["s"] = k.s;
    return j;
}

inline Json perturbation_json(const Perturbation& p) {
    Json j;
    switch (p.kind) {
        case Perturbation::Kind::None: j["kind"] = "none"; break;
        case Perturbation::Kind::Power:
            j["kind"] = "power";
            j["epsilon"] = p.epsilon;
            j["r"] = p.r;
            break;
        case Perturbation::Kind::ValuationShift:
            j["kind"] = "valuation_shift";
            j["c"] = std::to_string(p.c_num) + "/" + std::to_string(p.c_den);
            j["m"] = p.m;
            j["r"] = p.r;
            break;
    }
    return j;
}

inline Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["name"] = c.name;
    j["setting"] = {{"kind", setting_name(c.setting)},
                    {"dimension", c.dimension},
                    {"prime", c.prime},
                    {"precision", c.precision},
                    {"fuzzy_alpha", c.fuzzy_alpha},
                    {"fuzzy_beta", c.fuzzy_beta}};
    j["function"] = {{"linear", c.linear}, {"perturbation", perturbation_json(c.perturbation)}};
    j["control"] = control_spec_json(c.control);
    j["method"] = c.method;
    j["direction"] = to_string(c.direction);
    j["n_max"] = c.effective_n_max();
    j["tol"] = c.tol;
    j["grid"] = {{"seeds", c.seeds}, {"levels", c.levels}, {"depth", c.effective_depth()}, {"include_zero", c.include_zero}};
    j["t_grid"] = {{"lo", c.t_lo}, {"hi", c.t_hi}, {"count", c.t_count}};
    j["theorems"] = c.theorems;
    j["variant"] = c.variant;
    if (c.rassias_p) j["rassias_p"] = *c.rassias_p;
    j["seed"] = c.seed;
    j["output"] = {{"dir", c.output_dir}};
    return j;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline void validate(const ExperimentConfig& c) {
    if (c.method != "direct" && c.method != "fixed_point" && c.method != "both")
        throw ConfigError("method: expected direct, fixed_point or both, got '" + c.method + "'");
    if (c.variant != "theorem" && c.variant != "corollary")
        throw ConfigError("variant: expected theorem or corollary, got '" + c.variant + "'");
    if (c.effective_n_max() < 1) throw ConfigError("n_max: must be >= 1");
    if (c.effective_n_max() > c.effective_depth())
        throw ConfigError("n_max: " + std::to_string(c.effective_n_max()) + " exceeds grid.depth " +
                          std::to_string(c.effective_depth()));
    if (!(c.tol >= 0)) throw ConfigError("tol: must be >= 0");
    if (c.seeds.empty()) throw ConfigError("grid.seeds: empty");
    if (c.levels < 0) throw ConfigError("grid.levels: must be >= 0");
    if (c.t_count < 2 || !(c.t_lo > 0) || !(c.t_hi > c.t_lo)) throw ConfigError("t_grid: need 0 < lo < hi and count >= 2");
    if (c.dimension < 1) throw ConfigError("setting.dimension: must be >= 1");
    if (c.padic() && c.perturbation.kind == Perturbation::Kind::Power)
        throw ConfigError("function.perturbation.kind: power is not available on Q_p");
    if (!c.padic() && c.perturbation.kind == Perturbation::Kind::ValuationShift)
        throw ConfigError("function.perturbation.kind: valuation_shift needs the nonarchimedean setting");
    for (std::size_t i = 0; i < c.theorems.size(); ++i) {
        const auto& id = c.theorems[i];
        const std::string field = "theorems[" + std::to_string(i) + "]";
        if (!is_theorem_id(id)) throw ConfigError(field + ": unknown theorem id '" + id + "'");
        if (theorem_setting(id) != c.setting)
            throw ConfigError(field + ": " + id + " is not admissible in the " + setting_name(c.setting) + " setting");
        if (theorem_direction(id) != c.direction)
            throw ConfigError(field + ": " + id + " needs direction " + to_string(theorem_direction(id)));
    }
    ControlFunction probe;
    probe.family = c.control.family;
    probe.coefficient = c.control.fit ? 1.0 : c.control.theta;
    probe.r = c.control.r;
    std::copy(c.control.p, c.control.p + 3, probe.p.begin());
    probe.s = c.control.s;
    try {
        probe.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("control: ") + e.what());
    }
    if (c.setting == SettingKind::Fuzzy) FuzzyNorm(c.fuzzy_alpha, c.fuzzy_beta);
}

inline ControlFunction control_from_spec(const ControlSpec& k) {
    ControlFunction f;
    f.family = k.family;
    f.coefficient = k.fit ? 1.0 : k.theta;
    f.r = k.r;
    std::copy(k.p, k.p + 3, f.p.begin());
    f.s = k.s;
    f.validate();
    return f;
}

// ---------------------------------------------------------------------------
// Report pieces

inline Json num(long double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return static_cast<double>(v);
}

inline std::string csv_num(long double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v));
    return buf;
}

inline Json control_json(const ControlFunction& f) {
    return {{"family", to_string(f.family)},
            {"coefficient", f.coefficient},
            {"r", f.r},
            {"p", {f.p[0], f.p[1], f.p[2]}},
            {"s", f.s},
            {"describe", f.describe()}};
}

template <class C>
Json extraction_json(const C& c, const ExtractionResult<C>& ex) {
    Json pts = Json::array();
    for (const auto& p : ex.points) {
        Json q;
        q["id"] = p.id;
        q["x"] = c.describe(p.x);
        q["fx"] = c.describe(p.fx);
        q["A"] = c.describe(p.A);
        q["error"] = num(p.error);
        q["error_text"] = p.error_text;
        q["converged"] = p.converged;
        q["iterations"] = p.iterations;
        q["trace"] = p.trace;
        pts.push_back(std::move(q));
    }
    return {{"direction", to_string(ex.direction)}, {"n_max", ex.n_max}, {"tol", ex.tol},
            {"all_converged", ex.all_converged()},   {"max_error", num(ex.max_error())}, {"points", std::move(pts)}};
}

inline Json certificate_json(const Certificate& cert) {
    Json hyp = Json::array();
    for (const auto& h : cert.hypotheses) hyp.push_back({{"name", h.name}, {"ok", h.ok}, {"detail", h.detail}});
    Json rows = Json::array();
    for (const auto& r : cert.rows)
        rows.push_back({{"point_id", r.point_id},
                        {"error", num(r.error)},
                        {"bound", num(r.bound)},
                        {"margin", num(r.margin)},
                        {"t_witness", r.t_witness},
                        {"converged", r.converged},
                        {"iterations", r.iterations},
                        {"ok", r.ok}});
    return {{"theorem_id", cert.theorem_id}, {"variant", cert.variant},   {"setting", cert.setting},
            {"status", to_string(cert.status)}, {"pass", cert.pass()},    {"min_margin", num(cert.min_margin)},
            {"witness", cert.witness},       {"hypotheses", std::move(hyp)}, {"rows", std::move(rows)},
            {"notes", cert.notes}};
}

// ---------------------------------------------------------------------------
// Running one config

struct RunOutcome {
    std::string name;
    Json body;
    std::vector<Certificate> certificates;
    std::vector<std::string> csv_rows;
    bool pass = true;
    bool agreement_ok = true;
    bool contract_ok = true;
    std::vector<std::string> diagnostics;
};

inline const char* kCsvHeader = "point_id,setting,theorem_id,error,bound,margin,converged,iterations";

namespace detail {

template <class C>
SampledFunction<C> synthesize(const C& c, const ExperimentConfig& cfg, const Grid<C>& grid) {
    if constexpr (C::exact) {
        const auto [a, b] = parse_fraction(cfg.linear, "function.linear");
        return make_perturbed(c, c.rational(a, b), cfg.perturbation, grid);
    } else {
        return make_perturbed(c, token_to_double(cfg.linear, "function.linear"), cfg.perturbation, grid);
    }
}

template <class C>
Grid<C> build_grid(const C& c, const ExperimentConfig& cfg) {
    if constexpr (C::exact) {
        std::vector<std::pair<std::int64_t, std::int64_t>> seeds;
        for (const auto& s : cfg.seeds) seeds.push_back(parse_fraction(s, "grid.seeds"));
        return padic_grid(c, seeds, cfg.levels, cfg.effective_depth(), cfg.include_zero);
    } else {
        std::vector<double> seeds;
        for (const auto& s : cfg.seeds) seeds.push_back(token_to_double(s, "grid.seeds"));
        return real_grid(c, seeds, cfg.levels, cfg.effective_depth(), cfg.include_zero);
    }
}

template <class C>
RunOutcome run_on(const C& c, const ExperimentConfig& cfg) {
    RunOutcome out;
    out.name = cfg.name;
    const int n_max = cfg.effective_n_max();
    const Direction dir = cfg.direction;
    const bool corollary = cfg.variant == "corollary";
    const auto grid = build_grid(c, cfg);
    const auto f = synthesize(c, cfg, grid);

    auto triples = standard_triples(c, grid, dir == Direction::Downscale ? n_max : 0,
                                    dir == Direction::Upscale ? n_max : 0);
    ControlFunction phi = control_from_spec(cfg.control);
    if (phi.vanishes_on_axes()) triples = off_axis_triples(c, triples);

    Json body;
    body["config"] = config_to_json(cfg);
    body["grid"] = {{"points", grid.size()}, {"depth", grid.depth}, {"triples", triples.size()}};
    if (cfg.control.fit) {
        const auto rep = fit_theta(c, f, phi, triples);
        phi = rep.fitted;
        body["fit"] = {{"theta", rep.theta}, {"max_defect", num(rep.max_defect)}, {"samples", rep.samples},
                       {"witness", rep.witness}};
    }
    body["control"] = control_json(phi);

    std::optional<ExtractionResult<C>> direct;
    std::optional<FixedPointResult<C>> fp;
    std::optional<LipschitzReport> lip;
    if (cfg.run_direct()) {
        direct = extract(c, f, dir, n_max, cfg.tol);
        body["direct"] = extraction_json(c, *direct);
    }
    if (cfg.run_fixed_point()) {
        const ContractionOperator op{dir, declared_lipschitz(phi, dir, c.two())};
        fp = iterate_to_fixed_point(c, f, op, phi, n_max, cfg.tol);
        const auto core = synthesize(c, [&] {
            auto k = cfg;
            k.perturbation = Perturbation::none();
            return k;
        }(), grid);
        lip = lipschitz_probe(c, op, phi, probe_pairs(c, f, core, op, cfg.seed), grid,
                              std::min(kProbeLevels, grid.depth - 1));
        Json trace = Json::array();
        for (const auto& row : fp->trace)
            trace.push_back({{"n", row.n}, {"distance", to_string(row.distance)}, {"ratio", num(row.ratio)}});
        out.contract_ok = fp->decay_ok && fp->apriori_ok;
        body["fixed_point"] = {{"lipschitz", num(op.lipschitz)},
                               {"contraction", fp->contraction},
                               {"d_f_Jf", to_string(fp->d_f_Jf)},
                               {"radius", num(fp->radius)},
                               {"decay_ok", fp->decay_ok},
                               {"max_decay_ratio", num(fp->max_decay_ratio)},
                               {"decay_witness", fp->decay_witness},
                               {"apriori_ok", fp->apriori_ok},
                               {"max_error_ratio", num(fp->max_error_ratio)},
                               {"apriori_witness", fp->apriori_witness},
                               {"metric_trace", std::move(trace)},
                               {"probe",
                                {{"declared", num(lip->declared)},
                                 {"max_ratio", num(lip->max_ratio)},
                                 {"measured", lip->measured},
                                 {"skipped", lip->skipped},
                                 {"witness", lip->witness},
                                 {"pass", lip->pass}}},
                               {"extraction", extraction_json(c, fp->extraction)}};
    }
    if (direct && fp) {
        Json agree;
        if constexpr (C::exact) {
            bool all = true;
            std::string witness;
            for (std::size_t i = 0; i < direct->points.size(); ++i) {
                const auto& a = direct->points[i].A;
                const auto& b = fp->extraction.points[i].A;
                if (!agrees_to(a, b, precision_floor(a, b))) {
                    all = false;
                    witness = direct->points[i].id;
                }
            }
            agree = {{"criterion", "difference valuation >= precision floor"}, {"ok", all}, {"witness", witness}};
            out.agreement_ok = all;
        } else {
            long double worst = 0;
            std::string witness;
            for (std::size_t i = 0; i < direct->points.size(); ++i) {
                const long double d = c.norm(c.sub(direct->points[i].A, fp->extraction.points[i].A));
                if (d > worst || witness.empty()) {
                    worst = std::max(worst, d);
                    witness = direct->points[i].id;
                }
            }
            out.agreement_ok = worst <= kAgreementTolerance;
            agree = {{"criterion", "max distance <= 1e-9"}, {"max_distance", num(worst)}, {"ok", out.agreement_ok},
                     {"witness", witness}};
        }
        body["agreement"] = agree;
    }

    const auto& ex_for = [&](const std::string& id) -> const ExtractionResult<C>& {
        if (theorem_is_fixed_point(id) && fp) return fp->extraction;
        if (direct) return *direct;
        return fp->extraction;
    };
    const std::vector<double> ts = log_grid(cfg.t_lo, cfg.t_hi, static_cast<std::size_t>(cfg.t_count));
    for (const auto& id : cfg.theorems) {
        const auto& ex = ex_for(id);
        Certificate cert;
        if constexpr (C::exact) {
            NonArchInput in{c, f, ex, phi, triples, corollary, std::min(kPoundsDepth, n_max)};
            if (theorem_is_fixed_point(id))
                cert = check_nonarch_fp(in, declared_lipschitz(phi, dir, c.two()), dir);
            else
                cert = check_nonarch_direct(in, dir);
        } else {
            if (cfg.setting == SettingKind::Classical) {
                const double p = cfg.rassias_p ? *cfg.rassias_p : phi.r;
                cert = check_classical_rassias(c, f, ex, fit_cauchy_epsilon(c, f, p, grid.points), p);
                cert.variant = cfg.variant;
            } else {
                RealInput in{c, f, ex, phi, triples, corollary, ts, FuzzyNorm(cfg.fuzzy_alpha, cfg.fuzzy_beta)};
                cert = cfg.setting == SettingKind::Random ? check_rn(in, id) : check_fuzzy(in, id);
            }
        }
        if (theorem_is_fixed_point(id) && lip) {
            cert.require("Lipschitz probe d(Jg,Jh) <= L d(g,h)", lip->pass,
                         "max ratio " + format_real(lip->max_ratio) + " over " + std::to_string(lip->measured) +
                             " pairs" + (lip->witness.empty() ? "" : ", " + lip->witness));
            cert.finalize();
        }
        out.pass = out.pass && cert.pass();
        if (!cert.pass()) {
            std::string d = id + ": " + to_string(cert.status);
            for (const auto& h : cert.hypotheses)
                if (!h.ok) d += "; " + h.name + (h.detail.empty() ? "" : " (" + h.detail + ")");
            if (cert.status == CertStatus::Fail) d += "; min margin " + format_real(cert.min_margin) + " at " + cert.witness;
            out.diagnostics.push_back(d);
        }
        for (const auto& r : cert.rows)
            out.csv_rows.push_back(r.point_id + "," + setting_name(cfg.setting) + "," + id + "," + csv_num(r.error) +
                                   "," + csv_num(r.bound) + "," + csv_num(r.margin) + "," +
                                   (r.converged ? "true" : "false") + "," + std::to_string(r.iterations));
        out.certificates.push_back(std::move(cert));
    }
    Json certs = Json::array();
    for (const auto& cert : out.certificates) certs.push_back(certificate_json(cert));
    body["certificates"] = std::move(certs);

    if (cfg.setting == SettingKind::Random || cfg.setting == SettingKind::Fuzzy) {
        std::vector<double> errors, radii;
        for (const auto& cert : out.certificates)
            for (const auto& r : cert.rows) {
                errors.push_back(static_cast<double>(r.error));
                radii.push_back(static_cast<double>(r.bound));
            }
        const auto rep = cross_setting_check(errors, radii, ts);
        body["cross_setting"] = {{"samples", rep.samples}, {"mismatches", rep.mismatches}, {"ok", rep.ok()},
                                 {"witness", rep.witness}};
    }
    body["agreement_ok"] = out.agreement_ok;
    body["contract_ok"] = out.contract_ok;
    body["diagnostics"] = out.diagnostics;
    body["pass"] = out.pass;
    out.body = std::move(body);
    return out;
}

}  // namespace detail

/// Runs one config in memory. Exit-status semantics: `pass` is true iff every
/// requested certificate passes.
inline RunOutcome run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.padic()) {
        PadicCarrier c;
        c.prime = cfg.prime;
        c.precision = cfg.precision;
        PAdicNumber::from_integer(1, c.prime, c.precision);  // rejects a non-prime modulus
        return detail::run_on(c, cfg);
    }
    RealCarrier c;
    c.dimension = cfg.dimension;
    return detail::run_on(c, cfg);
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

inline std::string report_text(const RunOutcome& o, const std::string& timestamp) {
    Json j;
    j["header"] = {{"tool", "cjlab"}, {"timestamp", timestamp}};
    j["body"] = o.body;
    return j.dump(2) + "\n";
}

inline std::string summary_text(const RunOutcome& o) {
    std::string s = std::string(kCsvHeader) + "\n";
    for (const auto& r : o.csv_rows) s += r + "\n";
    return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) throw std::runtime_error("I/O error writing " + path.string());
}

inline void write_outcome(const RunOutcome& o, const std::filesystem::path& dir, const std::string& timestamp) {
    write_text(dir / "report.json", report_text(o, timestamp));
    write_text(dir / "summary.csv", summary_text(o));
}

// ---------------------------------------------------------------------------
// Matrix and sweeps

/// Runs configs on up to `jobs` threads; results come back in input order.
inline std::vector<RunOutcome> run_many(const std::vector<ExperimentConfig>& cfgs, unsigned jobs) {
    std::vector<RunOutcome> out(cfgs.size());
    std::vector<std::string> errors(cfgs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfgs.size(); i = next++) {
            try {
                out[i] = run_experiment(cfgs[i]);
            } catch (const std::exception& e) {
                errors[i] = cfgs[i].name + ": " + e.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cfgs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (!e.empty()) throw ConfigError(e);
    return out;
}

inline ExperimentConfig base_config(std::string name, SettingKind s, Direction d) {
    ExperimentConfig c;
    c.name = std::move(name);
    c.setting = s;
    c.direction = d;
    if (s == SettingKind::NonArchimedean) {
        c.seeds = {"1", "3", "1/3", "5"};
        c.levels = 2;
    } else if (s == SettingKind::Random) {
        c.seeds = {"1", "3", "5", "7", "9"};
        c.levels = 1;
        c.include_zero = false;
    }
    return c;
}

inline ControlSpec power_sum_spec(double r) {
    ControlSpec k;
    k.family = ControlFamily::PowerSum;
    k.r = r;
    return k;
}

/// The default matrix: four settings, both methods throughout.
inline std::vector<ExperimentConfig> default_matrix() {
    std::vector<ExperimentConfig> m;
    using D = Direction;
    using S = SettingKind;
    auto add = [&](ExperimentConfig c) {
        c.output_dir = "out/" + c.name;
        m.push_back(std::move(c));
    };
    {
        auto c = base_config("classical-root-up", S::Classical, D::Upscale);
        c.perturbation = Perturbation::power(0.1, 0.5);
        c.control = power_sum_spec(0.5);
        c.theorems = {"CL-RASSIAS"};
        add(c);
        c.name = "classical-additive";
        c.perturbation = Perturbation::none();
        c.rassias_p = 0.0;
        add(c);
        c = base_config("classical-square-down", S::Classical, D::Downscale);
        c.perturbation = Perturbation::power(0.1, 2.0);
        c.control = power_sum_spec(2.0);
        add(c);
    }
    {
        auto c = base_config("na-shift-down", S::NonArchimedean, D::Downscale);
        c.perturbation = Perturbation::valuation_shift(1, 1, 3, 0);
        c.control = power_sum_spec(0.5);
        c.theorems = {"NA-D-down", "NA-FP-down"};
        add(c);
        c.name = "na-shift-down-corollary";
        c.theorems = {"NA-FP-down"};
        c.variant = "corollary";
        add(c);
        c = base_config("na-xi-sum-down", S::NonArchimedean, D::Downscale);
        c.perturbation = Perturbation::valuation_shift(1, 1, 3, 0.5);
        c.control.family = ControlFamily::XiSum;
        c.control.s = 0.5;
        c.theorems = {"NA-D-down"};
        c.variant = "corollary";
        add(c);
        c = base_config("na-square-up", S::NonArchimedean, D::Upscale);
        c.perturbation = Perturbation::valuation_shift(1, 1, 0, 2);
        c.control = power_sum_spec(2.0);
        c.theorems = {"NA-D-up", "NA-FP-up"};
        add(c);
        c.name = "na-square-up-corollary";
        c.theorems = {"NA-FP-up"};
        c.variant = "corollary";
        add(c);
        c = base_config("na-xi-product-up", S::NonArchimedean, D::Upscale);
        c.perturbation = Perturbation::valuation_shift(1, 1, 0, 4);
        c.control.family = ControlFamily::XiProduct;
        c.control.s = 4.0 / 3.0;
        c.include_zero = false;
        c.theorems = {"NA-D-up"};
        c.variant = "corollary";
        add(c);
        c = base_config("na-additive", S::NonArchimedean, D::Downscale);
        c.perturbation = Perturbation::none();
        c.control = power_sum_spec(0.5);
        c.theorems = {"NA-D-down", "NA-FP-down"};
        add(c);
    }
    {
        auto c = base_config("rn-square-down", S::Random, D::Downscale);
        c.perturbation = Perturbation::power(0.1, 2.0);
        c.control = power_sum_spec(2.0);
        c.theorems = {"RN-D-down", "RN-FP-down"};
        c.variant = "corollary";
        add(c);
        c = base_config("rn-root-up", S::Random, D::Upscale);
        c.perturbation = Perturbation::power(0.1, 0.5);
        c.control = power_sum_spec(0.5);
        c.theorems = {"RN-D-up", "RN-FP-up"};
        c.variant = "corollary";
        add(c);
        c.name = "rn-root-up-theorem";
        c.variant = "theorem";
        add(c);
    }
    {
        auto c = base_config("fuzzy-square-down", S::Fuzzy, D::Downscale);
        c.perturbation = Perturbation::power(0.1, 2.0);
        c.control = power_sum_spec(2.0);
        c.theorems = {"FZ-D-down", "FZ-FP-down"};
        add(c);
        c = base_config("fuzzy-root-up", S::Fuzzy, D::Upscale);
        c.perturbation = Perturbation::power(0.1, 0.5);
        c.control = power_sum_spec(0.5);
        c.theorems = {"FZ-D-up", "FZ-FP-up"};
        add(c);
        c = base_config("fuzzy-power-down-corollary", S::Fuzzy, D::Downscale);
        c.perturbation = Perturbation::power(0.1, 1.5);
        c.control = power_sum_spec(1.5);
        c.theorems = {"FZ-FP-down"};
        c.variant = "corollary";
        add(c);
        c = base_config("fuzzy-product-up-corollary", S::Fuzzy, D::Upscale);
        c.perturbation = Perturbation::power(0.1, 0.75);
        c.control.family = ControlFamily::PowerProduct;
        c.control.p[0] = c.control.p[1] = c.control.p[2] = 0.25;
        c.include_zero = false;
        c.theorems = {"FZ-FP-up"};
        c.variant = "corollary";
        add(c);
    }
    return m;
}

/// Sets one sweep parameter. `r` moves the control exponent together with the
/// perturbation exponent; `p` sets equal product exponents with perturbation
/// exponent 3p; `theta` fixes the control coefficient; `epsilon` scales the
/// perturbation.
inline void apply_sweep_value(ExperimentConfig& c, const std::string& param, double v) {
    if (param == "r") {
        c.control.r = v;
        c.control.s = v;
        c.perturbation.r = v;
        if (c.rassias_p) c.rassias_p = v;
    } else if (param == "p") {
        c.control.p[0] = c.control.p[1] = c.control.p[2] = v;
        c.perturbation.r = 3 * v;
        if (c.rassias_p) c.rassias_p = v;
    } else if (param == "theta") {
        c.control.fit = false;
        c.control.theta = v;
    } else if (param == "epsilon") {
        c.perturbation.epsilon = v;
    } else {
        throw ConfigError("sweep: unknown parameter '" + param + "' (expected r, p, theta or epsilon)");
    }
}

struct SweepRow {
    double value;
    std::string theorem_id;
    long double min_margin;
    long double min_relative_margin;  // min margin/bound over rows with bound > 0
    CertStatus status;
};

inline const char* kSweepHeader = "param,value,theorem_id,min_margin,min_relative_margin,status";

/// `count` evenly spaced values in [lo, hi]; the seed is held fixed.
inline std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::string& param, double lo, double hi,
                                   int count, unsigned jobs = 1) {
    if (count < 1) throw ConfigError("sweep: count must be >= 1");
    std::vector<ExperimentConfig> cfgs;
    std::vector<double> values;
    for (int i = 0; i < count; ++i) {
        const double v = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
        auto c = base;
        apply_sweep_value(c, param, v);
        c.name = base.name + "-" + param + "-" + std::to_string(i);
        cfgs.push_back(std::move(c));
        values.push_back(v);
    }
    const auto outs = run_many(cfgs, jobs);
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < outs.size(); ++i)
        for (const auto& cert : outs[i].certificates) {
            long double rel = std::numeric_limits<long double>::infinity();
            for (const auto& r : cert.rows)
                if (r.bound > 0 && std::isfinite(r.bound)) rel = std::min(rel, r.margin / r.bound);
            rows.push_back({values[i], cert.theorem_id, cert.min_margin, rel, cert.status});
        }
    return rows;
}

inline std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows) {
    std::string s = std::string(kSweepHeader) + "\n";
    for (const auto& r : rows)
        s += param + "," + csv_num(r.value) + "," + r.theorem_id + "," + csv_num(r.min_margin) + "," +
             csv_num(r.min_relative_margin) + "," + to_string(r.status) + "\n";
    return s;
}

}  // namespace cjlab
