#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "anonsense/charfn.hpp"
#include "anonsense/estimator.hpp"

namespace anonsense {

struct CheckResult {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double expected = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool passed() const noexcept;
    std::string summary() const;
};

nlohmann::json to_json(const ValidationReport& report);

// Variance of the observable assembled copy by copy from the ternary outcome
// model: sum_j w_j^2 (E[a_j^2] - E[a_j]^2). Shares no code with variance_from.
double per_copy_variance(const MomentPlan& plan, std::span<const CharValue> b);

using VarianceRoutine = std::function<double(const MomentPlan&, std::span<const CharValue>)>;

struct ValidationOptions {
    std::vector<std::size_t> oracle_sites{2, 4, 8};
    std::size_t trials = 20;
    std::size_t variance_configs = 100;
    std::size_t qfi_dense_max = 256;
    std::uint64_t seed = 20240601;
    double omega_min = 1.0;
    double omega_max = 5.0;
};

// Gate-level pipeline vs the analytic register (x) data state, POVM
// probabilities and Re/Im extraction, norm preservation.
std::vector<CheckResult> check_oracle_equivalence(const ValidationOptions& opt);

// Closed-form variance vs per_copy_variance for k = 1..4 on random configs.
CheckResult check_variance_identity(const ValidationOptions& opt, const VarianceRoutine& variance);

// expectation_C, fd_moment and a direct difference of char_fn agree (k <= 4).
CheckResult check_consistency_triangle(const ValidationOptions& opt);

// Closed-form F times closed-form F^-1 against the identity, dense up to
// qfi_dense_max and via the rank-one structure up to 1024.
CheckResult check_qfi_inverse(const ValidationOptions& opt);

// Throws std::invalid_argument when an oracle site count is not a power of
// two (or exceeds the dense limit).
ValidationReport run_validate(const ValidationOptions& opt = {});

}  // namespace anonsense
