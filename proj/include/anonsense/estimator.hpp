#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonsense/charfn.hpp"
#include "anonsense/fields.hpp"

namespace anonsense {

enum class Parity { even, odd };

// Exact binomial coefficient; throws std::overflow_error past 64 bits.
std::uint64_t binomial(unsigned n, unsigned k);

inline constexpr unsigned kMaxOrder = 30;

// Order-k forward-difference observable over k + 1 copies. Copy j is read out
// at time j * dt in the x basis (even k) or y basis (odd k) and carries
// weight (-1)^(k+j) C(k, j) / dt^k.
class MomentPlan {
public:
    // Throws std::invalid_argument unless 1 <= k <= kMaxOrder and dt > 0.
    MomentPlan(unsigned k, double dt);

    unsigned order() const noexcept { return k_; }
    double dt() const noexcept { return dt_; }
    Parity parity() const noexcept { return k_ % 2 == 0 ? Parity::even : Parity::odd; }
    unsigned half_order() const noexcept { return k_ / 2; }
    std::size_t copies() const noexcept { return k_ + 1; }

    // (-1)^(floor(k/2)): maps the observable's mean onto the moment estimate.
    int moment_sign() const noexcept { return half_order() % 2 == 0 ? 1 : -1; }

    std::span<const std::int64_t> signed_binomials() const noexcept { return signed_; }
    std::span<const double> weights() const noexcept { return weights_; }

    // Times j * dt for j = 0..k.
    std::vector<double> copy_times() const;

private:
    unsigned k_;
    double dt_;
    std::vector<std::int64_t> signed_;
    std::vector<double> weights_;
};

// Statistics of the observable from B(j dt), j = 0..k (b.size() == k + 1).
double fd_moment_from(const MomentPlan& plan, std::span<const CharValue> b);
double expectation_from(const MomentPlan& plan, std::span<const CharValue> b);
double variance_from(const MomentPlan& plan, std::span<const CharValue> b);

double fd_moment(const FieldConfig& cfg, unsigned k, double dt);
double expectation_C(const FieldConfig& cfg, const MomentPlan& plan);
double variance_C(const FieldConfig& cfg, const MomentPlan& plan);

struct EstimatorReport {
    std::size_t L = 0;
    unsigned k = 0;
    double dt = 0.0;
    std::uint64_t n_repeats = 0;
    double expectation = 0.0;
    double variance = 0.0;
    double systematic_error = 0.0;
    double total_uncertainty = 0.0;
    // Empty when the exact moment is zero.
    std::optional<double> relative_uncertainty;
    double exact_moment = 0.0;
    double fd_moment = 0.0;
};

EstimatorReport report_from(const MomentPlan& plan, std::span<const CharValue> b, double exact,
                            std::size_t L, std::uint64_t N);

// Throws std::invalid_argument for N = 0.
EstimatorReport uncertainty(const FieldConfig& cfg, const MomentPlan& plan, std::uint64_t N);

// 2 pi / (omega_max k): keeps every copy's phase below one turn.
double dt_max(double omega_max, unsigned k);

// `points` log-spaced values from dt_hi * 10^-decades to dt_hi inclusive.
std::vector<double> log_dt_grid(double dt_hi, std::size_t points, double decades = 3.0);

// One report per grid point, evaluated from a single char_fn_grid pass.
std::vector<EstimatorReport> sweep_reports(const FieldConfig& cfg, unsigned k, std::uint64_t N,
                                           std::span<const double> dt_grid, unsigned workers = 0);

struct OptimalDt {
    double dt = 0.0;
    std::size_t index = 0;
    EstimatorReport report;
};

// Grid point with the smallest relative uncertainty; the smaller dt wins ties.
// The grid must hold >= 3 strictly ascending positive steps. Throws
// std::domain_error when the relative uncertainty is undefined.
OptimalDt optimal_dt(const FieldConfig& cfg, unsigned k, std::uint64_t N,
                     std::span<const double> dt_grid, unsigned workers = 0);
OptimalDt argmin_relative(std::span<const EstimatorReport> reports);

std::string csv_header();
// L,k,dt,N,expectation,variance,systematic_error,total_uncertainty,relative_uncertainty
std::string to_csv_row(const EstimatorReport& r);

}  // namespace anonsense
