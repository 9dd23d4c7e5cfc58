// cjlab: experiment runner for Cauchy-Jensen stability certificates.
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cjlab/experiment.hpp"
#include "cjlab/padic_expr.hpp"

namespace fs = std::filesystem;
using namespace cjlab;

namespace {

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

/// Without --config: the additive identity in the setting and direction of the
/// first requested theorem (classical upscale otherwise).
ExperimentConfig default_config(const std::vector<std::string>& ids) {
    SettingKind s = SettingKind::Classical;
    Direction d = Direction::Upscale;
    if (!ids.empty() && is_theorem_id(ids.front())) {
        s = theorem_setting(ids.front());
        d = theorem_direction(ids.front());
    }
    auto c = base_config("additive", s, d);
    c.perturbation = Perturbation::none();
    c.control = power_sum_spec(d == Direction::Downscale ? 2.0 : 0.5);
    if (s == SettingKind::NonArchimedean) c.control.r = d == Direction::Downscale ? 0.5 : 2.0;
    return c;
}

struct Common {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned jobs = 1;
    std::string theorems;
};

void add_common(CLI::App* sub, Common& o, bool with_out = true) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    if (with_out) sub->add_option("--out", o.out, "output directory (default: the config's output.dir)");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&o](std::uint64_t v) { o.seed = v, o.seed_set = true; }, "seed for randomized probes");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--theorem", o.theorems, "theorem ids, comma separated");
}

ExperimentConfig resolve(const Common& o) {
    const auto ids = split_ids(o.theorems);
    ExperimentConfig c = o.config.empty() ? default_config(ids) : load_config(o.config);
    if (!ids.empty()) c.theorems = ids;
    if (o.seed_set) c.seed = o.seed;
    if (!o.out.empty()) c.output_dir = o.out;
    return c;
}

void print_outcome(const RunOutcome& o) {
    for (const auto& cert : o.certificates) {
        std::printf("%-10s %-12s %-20s min_margin=%s witness=%s\n", cert.pass() ? "[PASS]" : "[FAIL]",
                    cert.theorem_id.c_str(), to_string(cert.status).c_str(), csv_num(cert.min_margin).c_str(),
                    cert.witness.c_str());
    }
    for (const auto& d : o.diagnostics) std::fprintf(stderr, "%s: %s\n", o.name.c_str(), d.c_str());
}

int run_one(const ExperimentConfig& c, bool write) {
    const auto o = run_experiment(c);
    if (write) {
        write_outcome(o, c.output_dir, utc_timestamp());
        std::printf("wrote %s/report.json and %s/summary.csv\n", c.output_dir.c_str(), c.output_dir.c_str());
    }
    print_outcome(o);
    return o.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cjlab: Cauchy-Jensen stability experiments"};
    app.require_subcommand(1);

    std::string expr;
    int prime = 2, prec = kDefaultPrecision;
    auto* padic = app.add_subcommand("padic", "evaluate a p-adic expression, e.g. \"norm(12, p=2)\"");
    padic->add_option("expr", expr, "expression")->required();
    padic->add_option("--prime", prime, "default prime");
    padic->add_option("--prec", prec, "default precision in digits");

    Common run_o, extract_o, certify_o, sweep_o, matrix_o;
    auto* run = app.add_subcommand("run", "run a config and write report.json and summary.csv");
    add_common(run, run_o);

    auto* extract = app.add_subcommand("extract", "print extracted additive values as CSV");
    add_common(extract, extract_o, false);

    auto* certify = app.add_subcommand("certify", "evaluate certificates and print verdicts");
    add_common(certify, certify_o);

    std::string param;
    double from = 0.1, to = 0.9;
    int count = 9;
    auto* sweep_cmd = app.add_subcommand("sweep", "vary one parameter (r, p, theta, epsilon); margins as CSV");
    sweep_cmd->add_option("param", param, "parameter")->required();
    sweep_cmd->add_option("--from", from, "first value");
    sweep_cmd->add_option("--to", to, "last value");
    sweep_cmd->add_option("--count", count, "number of values")->check(CLI::PositiveNumber);
    add_common(sweep_cmd, sweep_o);

    std::string write_configs;
    auto* matrix = app.add_subcommand("matrix", "run the default matrix");
    matrix->add_option("--out", matrix_o.out, "output directory")->default_val("out/matrix");
    matrix->add_option("--jobs", matrix_o.jobs, "worker threads")->check(CLI::PositiveNumber);
    matrix->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { matrix_o.seed = v, matrix_o.seed_set = true; }, "seed for all configs");
    matrix->add_option("--write-configs", write_configs, "write the matrix configs to DIR and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*padic) {
            std::printf("%s\n", eval_padic_expression(expr, prime, prec).c_str());
            return 0;
        }
        if (*run) return run_one(resolve(run_o), true);
        if (*certify) return run_one(resolve(certify_o), !certify_o.out.empty());
        if (*extract) {
            auto c = resolve(extract_o);
            c.theorems.clear();
            const auto o = run_experiment(c);
            std::printf("method,point_id,x,A,error,converged,iterations\n");
            for (const char* m : {"direct", "fixed_point"}) {
                const Json* ex = nullptr;
                if (std::string(m) == "direct" && o.body.contains("direct")) ex = &o.body["direct"];
                if (std::string(m) == "fixed_point" && o.body.contains("fixed_point"))
                    ex = &o.body["fixed_point"]["extraction"];
                if (!ex) continue;
                for (const auto& p : (*ex)["points"])
                    std::printf("%s,%s,\"%s\",\"%s\",%s,%s,%d\n", m, p["id"].get<std::string>().c_str(),
                                p["x"].get<std::string>().c_str(), p["A"].get<std::string>().c_str(),
                                p["error"].dump().c_str(), p["converged"].get<bool>() ? "true" : "false",
                                p["iterations"].get<int>());
            }
            return 0;
        }
        if (*sweep_cmd) {
            ExperimentConfig c;
            if (sweep_o.config.empty()) {
                c = default_matrix().front();  // classical root perturbation, upscale
                c.method = "direct";
            } else {
                c = load_config(sweep_o.config);
            }
            if (!sweep_o.theorems.empty()) c.theorems = split_ids(sweep_o.theorems);
            if (sweep_o.seed_set) c.seed = sweep_o.seed;
            const auto rows = sweep(c, param, from, to, count, sweep_o.jobs);
            const auto csv = sweep_csv(param, rows);
            if (sweep_o.out.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                write_text(fs::path(sweep_o.out) / ("sweep_" + param + ".csv"), csv);
                std::printf("wrote %s\n", (fs::path(sweep_o.out) / ("sweep_" + param + ".csv")).c_str());
            }
            bool all = true;
            for (const auto& r : rows) all = all && r.status == CertStatus::Pass;
            return all ? 0 : 1;
        }
        if (*matrix) {
            auto cfgs = default_matrix();
            if (!write_configs.empty()) {
                for (const auto& c : cfgs)
                    write_text(fs::path(write_configs) / (c.name + ".json"), config_to_json(c).dump(2) + "\n");
                std::printf("wrote %zu configs to %s\n", cfgs.size(), write_configs.c_str());
                return 0;
            }
            for (auto& c : cfgs) {
                if (matrix_o.seed_set) c.seed = matrix_o.seed;
                c.output_dir = (fs::path(matrix_o.out) / c.name).string();
            }
            const auto outs = run_many(cfgs, matrix_o.jobs);
            const auto ts = utc_timestamp();
            std::string index = "name,setting,certificates,pass,agreement_ok,contract_ok\n";
            bool all = true;
            for (std::size_t i = 0; i < outs.size(); ++i) {
                write_outcome(outs[i], cfgs[i].output_dir, ts);
                index += cfgs[i].name + "," + setting_name(cfgs[i].setting) + "," +
                         std::to_string(outs[i].certificates.size()) + "," + (outs[i].pass ? "true" : "false") + "," +
                         (outs[i].agreement_ok ? "true" : "false") + "," + (outs[i].contract_ok ? "true" : "false") +
                         "\n";
                std::printf("%s %s\n", outs[i].pass ? "[PASS]" : "[FAIL]", cfgs[i].name.c_str());
                all = all && outs[i].pass;
            }
            write_text(fs::path(matrix_o.out) / "matrix.csv", index);
            return all ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DepthError& e) {
        std::fprintf(stderr, "depth error: %s\n", e.what());
        return 3;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
