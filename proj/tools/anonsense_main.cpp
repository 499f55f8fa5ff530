// anonsense: experiment harness for anonymous moment estimation over a
// quantum sensing network. Emits plot-ready CSV / JSON.
//
// Exit codes: 0 success, 1 validation or self-check failure, 2 configuration error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anonsense/anonsense.hpp"

namespace {

using anonsense::ConfigError;
using anonsense::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

// Flag values as parsed; only flags actually given override the config file.
struct Flags {
    std::string config_path;
    std::string output_path;
    std::size_t L = 0;
    unsigned k = 0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::uint64_t seed = 0;
    std::size_t dt_grid = 0;
    double dt_decades = 0.0;
    std::string N;
    std::string mode;
    double dt = 0.0;
    std::string fields;
    std::vector<std::size_t> L_list;
    unsigned workers = 0;
    bool raw = false;
    bool self_check = false;

    std::vector<std::size_t> oracle_sites;
    std::size_t trials = 20;
};

struct Registered {
    CLI::Option* L = nullptr;
    CLI::Option* k = nullptr;
    CLI::Option* omega_min = nullptr;
    CLI::Option* omega_max = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* dt_grid = nullptr;
    CLI::Option* dt_decades = nullptr;
    CLI::Option* N = nullptr;
    CLI::Option* mode = nullptr;
    CLI::Option* dt = nullptr;
    CLI::Option* fields = nullptr;
    CLI::Option* L_list = nullptr;
    CLI::Option* workers = nullptr;
    CLI::Option* raw = nullptr;
    CLI::Option* self_check = nullptr;
};

Registered add_experiment_flags(CLI::App* cmd, Flags& f) {
    Registered r;
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its keys");
    cmd->add_option("-o,--output", f.output_path, "Write output here instead of stdout");
    r.L = cmd->add_option("-L,--L", f.L, "Number of sensor sites");
    r.k = cmd->add_option("-k,--k", f.k, "Moment order");
    r.omega_min = cmd->add_option("--omega-min", f.omega_min, "Field distribution lower bound");
    r.omega_max = cmd->add_option("--omega-max", f.omega_max, "Field distribution upper bound");
    r.seed = cmd->add_option("--seed", f.seed, "Reproducibility seed");
    r.dt_grid = cmd->add_option("--dt-grid", f.dt_grid, "Number of log-spaced dt points (>= 3)");
    r.dt_decades = cmd->add_option("--dt-decades", f.dt_decades, "Decades spanned below dt-max");
    r.N = cmd->add_option("-N,--N", f.N, "Repetitions, or 'auto' for the largest secure N");
    r.mode = cmd->add_option("--mode", f.mode, "analytic | montecarlo | both");
    r.dt = cmd->add_option("--dt", f.dt, "Time step (single-step commands)");
    r.fields = cmd->add_option("--fields", f.fields, "Field file (text or JSON array) instead of a draw");
    r.L_list = cmd->add_option("--L-list", f.L_list, "Site counts for sweep-l")->delimiter(',');
    r.workers = cmd->add_option("--workers", f.workers, "Worker threads (default: ANONSENSE_WORKERS or all cores)");
    r.raw = cmd->add_flag("--raw", f.raw, "Include raw per-repeat samples (sample)");
    r.self_check = cmd->add_flag("--self-check", f.self_check, "Fail if a Monte Carlo row is > 5 standard errors off");
    return r;
}

ExperimentConfig resolve_config(const Flags& f, const Registered& r) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw ConfigError("cannot open config file " + f.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        anonsense::apply_json(cfg, j);
    }
    auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(r.L)) cfg.L = f.L;
    if (given(r.k)) cfg.k = f.k;
    if (given(r.omega_min)) cfg.omega_min = f.omega_min;
    if (given(r.omega_max)) cfg.omega_max = f.omega_max;
    if (given(r.seed)) cfg.seed = f.seed;
    if (given(r.dt_grid)) cfg.dt_grid = f.dt_grid;
    if (given(r.dt_decades)) cfg.dt_decades = f.dt_decades;
    if (given(r.N)) {
        if (f.N == "auto") {
            cfg.N.reset();
        } else {
            try {
                std::size_t pos = 0;
                const auto n = std::stoull(f.N, &pos);
                if (pos != f.N.size()) throw std::invalid_argument(f.N);
                cfg.N = n;
            } catch (const std::exception&) {
                throw ConfigError("N must be a count or 'auto' (got '" + f.N + "')");
            }
        }
    }
    if (given(r.mode)) cfg.mode = anonsense::mode_from_string(f.mode);
    if (given(r.dt)) cfg.dt = f.dt;
    if (given(r.fields)) cfg.fields_path = f.fields;
    if (given(r.L_list)) cfg.L_list = f.L_list;
    if (given(r.workers)) cfg.workers = f.workers;
    if (given(r.raw)) cfg.raw = f.raw;
    if (given(r.self_check)) cfg.self_check = f.self_check;
    cfg.validate();
    return cfg;
}

void emit(const Flags& f, const std::string& text) {
    if (f.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(f.output_path);
    if (!out) throw ConfigError("cannot open output file " + f.output_path);
    out << text;
}

int cmd_estimate(const Flags& f, const Registered& r) {
    const auto cfg = resolve_config(f, r);
    emit(f, anonsense::to_csv(anonsense::run_estimate(cfg)));
    return kExitOk;
}

int cmd_sweep_dt(const Flags& f, const Registered& r) {
    const auto cfg = resolve_config(f, r);
    const auto result = anonsense::run_sweep_dt(cfg);
    emit(f, anonsense::to_csv(result));
    if (!result.self_check_passed) {
        std::cerr << "self-check failed: a Monte Carlo row lies more than 5 standard errors from the analytic mean\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_sweep_l(const Flags& f, const Registered& r) {
    const auto cfg = resolve_config(f, r);
    const auto result = anonsense::run_sweep_L(cfg, cfg.L_list);
    emit(f, anonsense::to_csv(result));
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return kExitOk;
}

int cmd_anonymity(const Flags& f, const Registered& r) {
    const auto cfg = resolve_config(f, r);
    const std::uint64_t N = anonsense::resolve_N(cfg, cfg.L);
    const double dt = cfg.dt.value_or(anonsense::dt_max(cfg.omega_max, cfg.k));
    if (cfg.L < 2) throw ConfigError("anonymity analysis needs L >= 2");
    const auto report = anonsense::qfi_report(cfg.L, cfg.k, dt, N);
    nlohmann::json j = anonsense::to_json(report);
    j["max_secure_N"] = anonsense::max_secure_N(cfg.L, cfg.k);
    emit(f, j.dump(2) + "\n");
    std::cerr << (report.secure ? "SECURE" : "NOT SECURE") << ": phase bound "
              << anonsense::format_double(report.phase_bound) << (report.secure ? " >= " : " < ") << "pi at L="
              << cfg.L << ", k=" << cfg.k << ", N=" << N << '\n';
    return kExitOk;
}

int cmd_sample(const Flags& f, const Registered& r) {
    const auto cfg = resolve_config(f, r);
    if (cfg.L >= anonsense::kAnalyticOnlySites) {
        throw ConfigError("sample is Monte Carlo only and limited to L < 1e7");
    }
    const auto fields = anonsense::experiment_fields(cfg, cfg.L);
    const std::uint64_t N = anonsense::resolve_N(cfg, fields.size());
    double dt = 0.0;
    if (cfg.dt) {
        dt = *cfg.dt;
    } else {
        const auto grid = anonsense::log_dt_grid(anonsense::dt_max(cfg.omega_max, cfg.k), cfg.dt_grid, cfg.dt_decades);
        dt = anonsense::optimal_dt(fields, cfg.k, N, grid, cfg.workers).dt;
    }
    const anonsense::MomentPlan plan(cfg.k, dt);
    const auto run = anonsense::sample_protocol(fields, plan, N, cfg.seed, cfg.workers);
    const auto analytic = anonsense::uncertainty(fields, plan, N);
    const double se = std::sqrt(analytic.variance / static_cast<double>(N));
    const double z = se > 0.0 ? (run.d_estimate - analytic.expectation) / se : 0.0;

    nlohmann::json out{
        {"config", anonsense::to_json(cfg)},
        {"run", anonsense::to_json(run, cfg.raw)},
        {"analytic",
         {{"expectation", analytic.expectation},
          {"variance", analytic.variance},
          {"fd_moment", analytic.fd_moment},
          {"exact_moment", analytic.exact_moment},
          {"standard_error", se},
          {"z", z}}},
    };
    emit(f, out.dump(2) + "\n");
    if (cfg.self_check && std::abs(z) > 5.0) {
        std::cerr << "self-check failed: z = " << z << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_validate(const Flags& f) {
    anonsense::ValidationOptions opt;
    if (!f.oracle_sites.empty()) opt.oracle_sites = f.oracle_sites;
    opt.trials = f.trials;
    anonsense::ValidationReport report;
    try {
        report = anonsense::run_validate(opt);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::cerr << report.summary();
    emit(f, anonsense::to_json(report).dump(2) + "\n");
    return report.passed() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anonymous moment estimation over a quantum sensing network"};
    app.require_subcommand(1);

    Flags flags;
    auto* estimate = app.add_subcommand("estimate", "Uncertainty report at one dt (or the sweep optimum)");
    auto* sweep_dt = app.add_subcommand("sweep-dt", "Relative uncertainty over the log-spaced dt grid");
    auto* sweep_l = app.add_subcommand("sweep-l", "Minimum relative uncertainty per L");
    auto* anonymity = app.add_subcommand("anonymity", "QFI matrix, Cramer-Rao bounds and security verdict");
    auto* sample = app.add_subcommand("sample", "Monte Carlo run of the measurement layer");
    auto* validate = app.add_subcommand("validate-oracle", "Gate-level oracle and cross-module identity checks");

    const Registered r_estimate = add_experiment_flags(estimate, flags);
    const Registered r_sweep_dt = add_experiment_flags(sweep_dt, flags);
    const Registered r_sweep_l = add_experiment_flags(sweep_l, flags);
    const Registered r_anonymity = add_experiment_flags(anonymity, flags);
    const Registered r_sample = add_experiment_flags(sample, flags);
    validate->add_option("--oracle-sites", flags.oracle_sites, "Site counts (powers of two <= 16)")->delimiter(',');
    validate->add_option("--trials", flags.trials, "Random (config, t) pairs per site count");
    validate->add_option("-o,--output", flags.output_path, "Write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*estimate) return cmd_estimate(flags, r_estimate);
        if (*sweep_dt) return cmd_sweep_dt(flags, r_sweep_dt);
        if (*sweep_l) return cmd_sweep_l(flags, r_sweep_l);
        if (*anonymity) return cmd_anonymity(flags, r_anonymity);
        if (*sample) return cmd_sample(flags, r_sample);
        if (*validate) return cmd_validate(flags);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
