#include "anonsense/experiment.hpp"

#include <cmath>
#include <sstream>

#include "anonsense/anonymity.hpp"
#include "anonsense/protocol_sim.hpp"
#include "anonsense/rng.hpp"

namespace anonsense {

std::string to_string(Mode m) {
    switch (m) {
        case Mode::analytic: return "analytic";
        case Mode::montecarlo: return "montecarlo";
        case Mode::both: return "both";
    }
    return "analytic";
}

Mode mode_from_string(const std::string& s) {
    if (s == "analytic") return Mode::analytic;
    if (s == "montecarlo") return Mode::montecarlo;
    if (s == "both") return Mode::both;
    throw ConfigError("mode must be analytic, montecarlo or both (got '" + s + "')");
}

void ExperimentConfig::validate() const {
    if (L == 0) throw ConfigError("L must be >= 1");
    if (k < 1 || k > kMaxOrder) throw ConfigError("k must be in [1, " + std::to_string(kMaxOrder) + "]");
    if (!(omega_min < omega_max) || !std::isfinite(omega_min) || !std::isfinite(omega_max)) {
        throw ConfigError("omega-min must be < omega-max");
    }
    if (!(omega_max > 0.0)) throw ConfigError("omega-max must be positive");
    if (dt_grid < 3) throw ConfigError("dt-grid must be >= 3");
    if (!(dt_decades > 0.0)) throw ConfigError("dt-decades must be > 0");
    if (N && *N == 0) throw ConfigError("N must be >= 1 or \"auto\"");
    if (dt && !(*dt > 0.0)) throw ConfigError("dt must be > 0");
    for (std::size_t i = 0; i < L_list.size(); ++i) {
        if (L_list[i] == 0) throw ConfigError("L-list entries must be >= 1");
        if (i > 0 && L_list[i] <= L_list[i - 1]) throw ConfigError("L-list must be strictly ascending");
    }
}

void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "L") cfg.L = value.get<std::size_t>();
            else if (key == "k") cfg.k = value.get<unsigned>();
            else if (key == "omega-min") cfg.omega_min = value.get<double>();
            else if (key == "omega-max") cfg.omega_max = value.get<double>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "dt-grid") cfg.dt_grid = value.get<std::size_t>();
            else if (key == "dt-decades") cfg.dt_decades = value.get<double>();
            else if (key == "N") {
                if (value.is_string()) {
                    if (value.get<std::string>() != "auto") throw ConfigError("N must be a count or \"auto\"");
                    cfg.N.reset();
                } else {
                    cfg.N = value.get<std::uint64_t>();
                }
            } else if (key == "mode") cfg.mode = mode_from_string(value.get<std::string>());
            else if (key == "dt") {
                if (value.is_null()) cfg.dt.reset();
                else cfg.dt = value.get<double>();
            } else if (key == "fields") {
                if (value.is_null()) cfg.fields_path.reset();
                else cfg.fields_path = value.get<std::string>();
            } else if (key == "L-list") cfg.L_list = value.get<std::vector<std::size_t>>();
            else if (key == "raw") cfg.raw = value.get<bool>();
            else if (key == "self-check") cfg.self_check = value.get<bool>();
            else if (key == "workers") cfg.workers = value.get<unsigned>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{
        {"L", cfg.L},
        {"k", cfg.k},
        {"omega-min", cfg.omega_min},
        {"omega-max", cfg.omega_max},
        {"seed", cfg.seed},
        {"dt-grid", cfg.dt_grid},
        {"dt-decades", cfg.dt_decades},
        {"mode", to_string(cfg.mode)},
        {"L-list", cfg.L_list},
        {"raw", cfg.raw},
        {"self-check", cfg.self_check},
    };
    j["N"] = cfg.N ? nlohmann::json(*cfg.N) : nlohmann::json("auto");
    j["dt"] = cfg.dt ? nlohmann::json(*cfg.dt) : nlohmann::json(nullptr);
    j["fields"] = cfg.fields_path ? nlohmann::json(*cfg.fields_path) : nlohmann::json(nullptr);
    return j;
}

std::uint64_t resolve_N(const ExperimentConfig& cfg, std::size_t L) {
    if (cfg.N) return *cfg.N;
    const std::uint64_t n = max_secure_N(L, cfg.k);
    if (n == 0) {
        throw ConfigError("auto N is unsatisfiable: no N >= 1 meets the security condition at L=" +
                          std::to_string(L) + ", k=" + std::to_string(cfg.k));
    }
    return n;
}

FieldConfig experiment_fields(const ExperimentConfig& cfg, std::size_t L) {
    if (cfg.fields_path) {
        try {
            return load_fields(*cfg.fields_path);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("fields: ") + e.what());
        }
    }
    return draw_fields(UniformFieldDistribution{cfg.omega_min, cfg.omega_max, cfg.seed}, L);
}

Mode effective_mode(const ExperimentConfig& cfg, std::size_t L) {
    return L >= kAnalyticOnlySites ? Mode::analytic : cfg.mode;
}

namespace {

nlohmann::json base_metadata(const ExperimentConfig& cfg, std::size_t L, std::uint64_t N) {
    nlohmann::json meta = to_json(cfg);
    meta["resolved"] = {
        {"L", L},
        {"N", N},
        {"N-source", cfg.N ? "explicit" : "auto (max secure N)"},
        {"mode", to_string(effective_mode(cfg, L))},
        {"dt-max", dt_max(cfg.omega_max, cfg.k)},
        {"dt-grid-spacing", "log, [dt-max * 10^-dt-decades, dt-max]"},
        {"rng", "splitmix64-counter"},
    };
    return meta;
}

std::string config_line(const nlohmann::json& meta) { return "# config: " + meta.dump() + "\n"; }

}  // namespace

SweepResult run_sweep_dt(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto fields = experiment_fields(cfg, cfg.L);
    const std::size_t L = fields.size();
    const std::uint64_t N = resolve_N(cfg, L);
    const auto grid = log_dt_grid(dt_max(cfg.omega_max, cfg.k), cfg.dt_grid, cfg.dt_decades);
    const auto reports = sweep_reports(fields, cfg.k, N, grid, cfg.workers);

    SweepResult result;
    result.metadata = base_metadata(cfg, L, N);
    result.best_index = argmin_relative(reports).index;
    result.rows.reserve(reports.size());
    const Mode mode = effective_mode(cfg, L);
    for (std::size_t g = 0; g < reports.size(); ++g) {
        SweepRow row{reports[g], std::nullopt, std::nullopt};
        if (mode != Mode::analytic) {
            const MomentPlan plan(cfg.k, grid[g]);
            const auto run = sample_protocol(fields, plan, N, splitmix64_mix(cfg.seed + g), cfg.workers);
            row.mc_moment_estimate = estimate_moment_mc(run, cfg.k);
            const double se = std::sqrt(reports[g].variance / static_cast<double>(N));
            row.mc_z = se > 0.0 ? (run.d_estimate - reports[g].expectation) / se : 0.0;
            if (cfg.self_check && std::abs(*row.mc_z) > 5.0) result.self_check_passed = false;
        }
        result.rows.push_back(row);
    }
    result.metadata["resolved"]["dt-star"] = reports[result.best_index].dt;
    return result;
}

std::string to_csv(const SweepResult& result) {
    const bool mc = !result.rows.empty() && result.rows.front().mc_z.has_value();
    std::string out = config_line(result.metadata);
    out += csv_header() + ",log10_relative_uncertainty";
    if (mc) out += ",mc_moment_estimate,mc_z";
    out += '\n';
    for (const auto& row : result.rows) {
        out += to_csv_row(row.report) + ',';
        out += row.report.relative_uncertainty ? format_double(std::log10(*row.report.relative_uncertainty)) : "nan";
        if (mc) out += ',' + format_double(*row.mc_moment_estimate) + ',' + format_double(*row.mc_z);
        out += '\n';
    }
    return out;
}

LSweepResult run_sweep_L(const ExperimentConfig& tmpl, const std::vector<std::size_t>& L_list) {
    ExperimentConfig cfg = tmpl;
    cfg.L_list = L_list;
    cfg.fields_path.reset();
    cfg.validate();
    if (L_list.empty()) throw ConfigError("L-list must not be empty");

    LSweepResult result;
    result.metadata = to_json(cfg);
    result.metadata["resolved"] = {{"dt-max", dt_max(cfg.omega_max, cfg.k)},
                                   {"N-source", cfg.N ? "explicit" : "auto (max secure N)"},
                                   {"rng", "splitmix64-counter"}};
    const auto grid = log_dt_grid(dt_max(cfg.omega_max, cfg.k), cfg.dt_grid, cfg.dt_decades);
    for (std::size_t L : L_list) {
        const auto fields = experiment_fields(cfg, L);
        const std::uint64_t N = resolve_N(cfg, L);
        const auto best = optimal_dt(fields, cfg.k, N, grid, cfg.workers);
        result.rows.push_back({L, N, best.dt, *best.report.relative_uncertainty});
    }
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        if (result.rows[i].min_relative_uncertainty > result.rows[i - 1].min_relative_uncertainty) {
            result.non_increasing = false;
            result.warnings.push_back("min relative uncertainty rose from L=" + std::to_string(result.rows[i - 1].L) +
                                      " to L=" + std::to_string(result.rows[i].L));
        }
    }
    return result;
}

std::string to_csv(const LSweepResult& result) {
    std::string out = config_line(result.metadata);
    out += "L,N,dt_star,min_relative_uncertainty,log10_min_relative_uncertainty\n";
    for (const auto& row : result.rows) {
        out += std::to_string(row.L) + ',' + std::to_string(row.N) + ',' + format_double(row.dt_star) + ',' +
               format_double(row.min_relative_uncertainty) + ',' +
               format_double(std::log10(row.min_relative_uncertainty)) + '\n';
    }
    return out;
}

EstimateResult run_estimate(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto fields = experiment_fields(cfg, cfg.L);
    const std::size_t L = fields.size();
    const std::uint64_t N = resolve_N(cfg, L);
    EstimateResult result;
    result.metadata = base_metadata(cfg, L, N);
    if (cfg.dt) {
        result.report = uncertainty(fields, MomentPlan(cfg.k, *cfg.dt), N);
    } else {
        const auto grid = log_dt_grid(dt_max(cfg.omega_max, cfg.k), cfg.dt_grid, cfg.dt_decades);
        result.report = optimal_dt(fields, cfg.k, N, grid, cfg.workers).report;
        result.metadata["resolved"]["dt-star"] = result.report.dt;
    }
    return result;
}

std::string to_csv(const EstimateResult& result) {
    return config_line(result.metadata) + csv_header() + '\n' + to_csv_row(result.report) + '\n';
}

}  // namespace anonsense
