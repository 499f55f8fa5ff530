#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "anonsense/estimator.hpp"
#include "anonsense/fields.hpp"

namespace anonsense {

// Bad or unsatisfiable experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { analytic, montecarlo, both };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Runs at or above this L are evaluated in analytic mode only.
inline constexpr std::size_t kAnalyticOnlySites = 10'000'000;

struct ExperimentConfig {
    std::size_t L = 10'000;
    unsigned k = 1;
    double omega_min = 1.0;
    double omega_max = 5.0;
    std::uint64_t seed = 1;
    std::size_t dt_grid = 200;
    double dt_decades = 3.0;
    // Empty means "auto": the largest N that keeps the security condition.
    std::optional<std::uint64_t> N;
    Mode mode = Mode::analytic;
    // Single-step subcommands; empty means the sweep optimum.
    std::optional<double> dt;
    std::optional<std::string> fields_path;
    std::vector<std::size_t> L_list{1'000, 10'000, 100'000, 1'000'000};
    bool raw = false;
    bool self_check = false;
    unsigned workers = 0;

    // Throws ConfigError.
    void validate() const;
};

// Any subset of the kebab-case keys; unknown keys are rejected.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

// cfg.N, or max_secure_N(L, k). Throws ConfigError when auto-N has no secure value.
std::uint64_t resolve_N(const ExperimentConfig& cfg, std::size_t L);

// Fields from cfg.fields_path, else drawn from the uniform distribution.
FieldConfig experiment_fields(const ExperimentConfig& cfg, std::size_t L);

Mode effective_mode(const ExperimentConfig& cfg, std::size_t L);

struct SweepRow {
    EstimatorReport report;
    std::optional<double> mc_moment_estimate;
    std::optional<double> mc_z;
};

struct SweepResult {
    nlohmann::json metadata;
    std::vector<SweepRow> rows;
    std::size_t best_index = 0;
    // True unless self-check was requested and some |z| > 5.
    bool self_check_passed = true;
};

SweepResult run_sweep_dt(const ExperimentConfig& cfg);
std::string to_csv(const SweepResult& result);

struct LSweepRow {
    std::size_t L = 0;
    std::uint64_t N = 0;
    double dt_star = 0.0;
    double min_relative_uncertainty = 0.0;
};

struct LSweepResult {
    nlohmann::json metadata;
    std::vector<LSweepRow> rows;
    // Soft trend check; a violation is reported, not raised.
    bool non_increasing = true;
    std::vector<std::string> warnings;
};

// L_list must be ascending.
LSweepResult run_sweep_L(const ExperimentConfig& tmpl, const std::vector<std::size_t>& L_list);
std::string to_csv(const LSweepResult& result);

struct EstimateResult {
    nlohmann::json metadata;
    EstimatorReport report;
};

// At cfg.dt, or the sweep optimum when unset.
EstimateResult run_estimate(const ExperimentConfig& cfg);
std::string to_csv(const EstimateResult& result);

}  // namespace anonsense
