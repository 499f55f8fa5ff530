#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "anonsense/charfn.hpp"
#include "anonsense/estimator.hpp"
#include "anonsense/fields.hpp"

namespace anonsense {

enum class Basis { x, y };

// Ternary readout of one copy's observable |+..+><+..+|_r (x) sigma_{x|y}:
// +1 / -1 when the register lands on the all-plus state, 0 otherwise.
struct OutcomeDistribution {
    double p_plus = 0.0;
    double p_minus = 0.0;
    double p_zero = 0.0;
    Basis basis = Basis::x;

    double mean() const noexcept { return p_plus - p_minus; }
    double second_moment() const noexcept { return p_plus + p_minus; }
};

// p_pm = (1 + |B|^2 pm 2A) / 4, p_zero = (1 - |B|^2) / 2 with A = Re B (x) or Im B (y).
OutcomeDistribution outcome_distribution(const CharValue& b, Basis basis);
OutcomeDistribution outcome_distribution(const FieldConfig& cfg, double t, Basis basis);

inline Basis basis_for(const MomentPlan& plan) noexcept {
    return plan.parity() == Parity::even ? Basis::x : Basis::y;
}

struct SampleRun {
    std::uint64_t seed = 0;
    std::uint64_t n_repeats = 0;
    unsigned k = 0;
    double dt = 0.0;
    std::vector<double> per_repeat_C;
    double d_estimate = 0.0;
    double d_variance_empirical = 0.0;
};

// Mean and unbiased variance exactly as stored in a SampleRun.
double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs, double mean);

// N repetitions; each repetition draws one outcome per copy j from
// outcome_distribution(B(j dt)) using CounterRng(seed, r + 1) index j, and
// stores sum_j w_j a_j. Bit-identical for a fixed seed regardless of workers.
SampleRun sample_protocol(const FieldConfig& cfg, const MomentPlan& plan, std::uint64_t N,
                          std::uint64_t seed, unsigned workers = 0);

// Same, with the per-copy distributions already evaluated.
SampleRun sample_protocol(std::span<const OutcomeDistribution> copies, const MomentPlan& plan,
                          std::uint64_t N, std::uint64_t seed, unsigned workers = 0);

// (-1)^floor(k/2) * d_estimate.
double estimate_moment_mc(const SampleRun& run, unsigned k);

nlohmann::json to_json(const SampleRun& run, bool include_raw);

}  // namespace anonsense
