#include "anonsense/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anonsense/parallel.hpp"
#include "anonsense/rng.hpp"
#include "anonsense/summation.hpp"

namespace anonsense {

OutcomeDistribution outcome_distribution(const CharValue& b, Basis basis) {
    const double mag2 = std::min(b.abs2(), 1.0);
    const double a = basis == Basis::x ? b.re : b.im;
    OutcomeDistribution d;
    d.basis = basis;
    d.p_plus = std::clamp((1.0 + mag2 + 2.0 * a) / 4.0, 0.0, 1.0);
    d.p_minus = std::clamp((1.0 + mag2 - 2.0 * a) / 4.0, 0.0, 1.0);
    d.p_zero = (1.0 - mag2) / 2.0;
    return d;
}

OutcomeDistribution outcome_distribution(const FieldConfig& cfg, double t, Basis basis) {
    return outcome_distribution(char_fn(cfg, t), basis);
}

double sample_mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    NeumaierSum acc;
    for (double x : xs) acc.add((x - mean) * (x - mean));
    return acc.value() / static_cast<double>(xs.size() - 1);
}

SampleRun sample_protocol(std::span<const OutcomeDistribution> copies, const MomentPlan& plan,
                          std::uint64_t N, std::uint64_t seed, unsigned workers) {
    if (N == 0) throw std::invalid_argument("sample_protocol: N must be >= 1");
    if (copies.size() != plan.copies()) throw std::invalid_argument("sample_protocol: one distribution per copy");
    SampleRun run;
    run.seed = seed;
    run.n_repeats = N;
    run.k = plan.order();
    run.dt = plan.dt();
    run.per_repeat_C.resize(N);

    const auto weights = plan.weights();
    constexpr std::size_t kBatch = 4096;
    const std::size_t batches = (N + kBatch - 1) / kBatch;
    parallel_for(
        batches,
        [&](std::size_t b) {
            const std::uint64_t end = std::min<std::uint64_t>(N, (b + 1) * kBatch);
            for (std::uint64_t r = b * kBatch; r < end; ++r) {
                const CounterRng rng(seed, r + 1);
                double c = 0.0;
                for (std::size_t j = 0; j < copies.size(); ++j) {
                    const double u = rng.unit_at(j);
                    const auto& d = copies[j];
                    if (u < d.p_plus) {
                        c += weights[j];
                    } else if (u < d.p_plus + d.p_minus) {
                        c -= weights[j];
                    }
                }
                run.per_repeat_C[r] = c;
            }
        },
        workers);

    run.d_estimate = sample_mean(run.per_repeat_C);
    run.d_variance_empirical = sample_variance(run.per_repeat_C, run.d_estimate);
    return run;
}

SampleRun sample_protocol(const FieldConfig& cfg, const MomentPlan& plan, std::uint64_t N, std::uint64_t seed,
                          unsigned workers) {
    if (N == 0) throw std::invalid_argument("sample_protocol: N must be >= 1");
    const auto times = plan.copy_times();
    const auto b = char_fn_grid(cfg, times, workers);
    std::vector<OutcomeDistribution> copies;
    copies.reserve(b.size());
    for (const auto& v : b) copies.push_back(outcome_distribution(v, basis_for(plan)));
    return sample_protocol(copies, plan, N, seed, workers);
}

double estimate_moment_mc(const SampleRun& run, unsigned k) {
    return (k / 2) % 2 == 0 ? run.d_estimate : -run.d_estimate;
}

nlohmann::json to_json(const SampleRun& run, bool include_raw) {
    nlohmann::json j{
        {"seed", run.seed},
        {"N", run.n_repeats},
        {"k", run.k},
        {"dt", run.dt},
        {"d_estimate", run.d_estimate},
        {"d_variance_empirical", run.d_variance_empirical},
        {"moment_estimate", estimate_moment_mc(run, run.k)},
        {"standard_error", std::sqrt(run.d_variance_empirical / static_cast<double>(run.n_repeats))},
    };
    if (include_raw) j["per_repeat_C"] = run.per_repeat_C;
    return j;
}

}  // namespace anonsense
