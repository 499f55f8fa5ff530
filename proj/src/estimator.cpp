#include "anonsense/estimator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "anonsense/summation.hpp"

namespace anonsense {

__extension__ using u128 = unsigned __int128;

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (unsigned i = 0; i < k; ++i) {
        r = r * (n - i) / (i + 1);
        if (r > std::numeric_limits<std::uint64_t>::max()) {
            throw std::overflow_error("binomial: result exceeds 64 bits");
        }
    }
    return static_cast<std::uint64_t>(r);
}

MomentPlan::MomentPlan(unsigned k, double dt) : k_(k), dt_(dt) {
    if (k < 1 || k > kMaxOrder) {
        throw std::invalid_argument("MomentPlan: order k must be in [1, " + std::to_string(kMaxOrder) + "]");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("MomentPlan: dt must be > 0");
    const double scale = std::pow(dt, static_cast<double>(k));
    signed_.resize(k + 1);
    weights_.resize(k + 1);
    for (unsigned j = 0; j <= k; ++j) {
        const auto c = static_cast<std::int64_t>(binomial(k, j));
        signed_[j] = (k + j) % 2 == 0 ? c : -c;
        weights_[j] = static_cast<double>(signed_[j]) / scale;
    }
}

std::vector<double> MomentPlan::copy_times() const {
    std::vector<double> times(copies());
    for (unsigned j = 0; j <= k_; ++j) times[j] = j * dt_;
    return times;
}

namespace {

void check_samples(const MomentPlan& plan, std::span<const CharValue> b) {
    if (b.size() != plan.copies()) {
        throw std::invalid_argument("expected B(j dt) for j = 0..k");
    }
}

double projection(const MomentPlan& plan, const CharValue& v) noexcept {
    return plan.parity() == Parity::even ? v.re : v.im;
}

}  // namespace

// Forward difference as written for the moment estimate; the odd sum starts
// at j = 1 since Im B(0) = 0.
double fd_moment_from(const MomentPlan& plan, std::span<const CharValue> b) {
    check_samples(plan, b);
    const unsigned k = plan.order();
    const unsigned first = plan.parity() == Parity::even ? 0 : 1;
    NeumaierSum acc;
    for (unsigned j = first; j <= k; ++j) {
        acc.add(static_cast<double>(plan.signed_binomials()[j]) * projection(plan, b[j]));
    }
    return plan.moment_sign() * acc.value() / std::pow(plan.dt(), static_cast<double>(k));
}

double expectation_from(const MomentPlan& plan, std::span<const CharValue> b) {
    check_samples(plan, b);
    NeumaierSum acc;
    for (unsigned j = 0; j <= plan.order(); ++j) {
        acc.add(static_cast<double>(plan.signed_binomials()[j]) * projection(plan, b[j]));
    }
    return acc.value() / std::pow(plan.dt(), static_cast<double>(plan.order()));
}

// Closed forms:
//   k = 2m:   1/(2 dt^4m) sum_{j=1}^{2m} C(2m,j)^2 [1 + Im^2 - Re^2]
//   k = 2m+1: 1/(2 dt^(4m+2)) [C(4m+2,2m+1) + 1 + sum_{j=1}^{2m+1} C(2m+1,j)^2 (Re^2 - Im^2)]
double variance_from(const MomentPlan& plan, std::span<const CharValue> b) {
    check_samples(plan, b);
    const unsigned k = plan.order();
    NeumaierSum acc;
    if (plan.parity() == Parity::odd) {
        acc.add(static_cast<double>(binomial(2 * k, k)));
        acc.add(1.0);
    }
    for (unsigned j = 1; j <= k; ++j) {
        const double c = static_cast<double>(binomial(k, j));
        const double re2 = b[j].re * b[j].re;
        const double im2 = b[j].im * b[j].im;
        const double bracket = plan.parity() == Parity::even ? (1.0 + im2) - re2 : re2 - im2;
        acc.add(c * c * bracket);
    }
    const double v = acc.value() / (2.0 * std::pow(plan.dt(), 2.0 * k));
    return std::max(v, 0.0);
}

double fd_moment(const FieldConfig& cfg, unsigned k, double dt) {
    const MomentPlan plan(k, dt);
    const auto times = plan.copy_times();
    return fd_moment_from(plan, char_fn_grid(cfg, times));
}

double expectation_C(const FieldConfig& cfg, const MomentPlan& plan) {
    const auto times = plan.copy_times();
    return expectation_from(plan, char_fn_grid(cfg, times));
}

double variance_C(const FieldConfig& cfg, const MomentPlan& plan) {
    const auto times = plan.copy_times();
    return variance_from(plan, char_fn_grid(cfg, times));
}

EstimatorReport report_from(const MomentPlan& plan, std::span<const CharValue> b, double exact,
                            std::size_t L, std::uint64_t N) {
    if (N == 0) throw std::invalid_argument("uncertainty: N must be >= 1");
    EstimatorReport r;
    r.L = L;
    r.k = plan.order();
    r.dt = plan.dt();
    r.n_repeats = N;
    r.expectation = expectation_from(plan, b);
    r.variance = variance_from(plan, b);
    r.fd_moment = fd_moment_from(plan, b);
    r.exact_moment = exact;
    r.systematic_error = plan.moment_sign() * (r.fd_moment - exact);
    r.total_uncertainty = std::sqrt(r.variance / static_cast<double>(N) + r.systematic_error * r.systematic_error);
    if (exact != 0.0) r.relative_uncertainty = r.total_uncertainty / std::abs(exact);
    return r;
}

EstimatorReport uncertainty(const FieldConfig& cfg, const MomentPlan& plan, std::uint64_t N) {
    if (N == 0) throw std::invalid_argument("uncertainty: N must be >= 1");
    const auto times = plan.copy_times();
    return report_from(plan, char_fn_grid(cfg, times), exact_moment(cfg, plan.order()), cfg.size(), N);
}

double dt_max(double omega_max, unsigned k) {
    if (!(omega_max > 0.0) || k == 0) throw std::invalid_argument("dt_max: omega_max and k must be positive");
    return 2.0 * std::numbers::pi / (omega_max * k);
}

std::vector<double> log_dt_grid(double dt_hi, std::size_t points, double decades) {
    if (points < 3) throw std::invalid_argument("log_dt_grid: need at least 3 points");
    if (!(dt_hi > 0.0) || !(decades > 0.0)) throw std::invalid_argument("log_dt_grid: bad range");
    std::vector<double> grid(points);
    const double lo = std::log10(dt_hi) - decades;
    for (std::size_t i = 0; i + 1 < points; ++i) {
        grid[i] = std::pow(10.0, lo + decades * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    grid.back() = dt_hi;
    return grid;
}

std::vector<EstimatorReport> sweep_reports(const FieldConfig& cfg, unsigned k, std::uint64_t N,
                                           std::span<const double> dt_grid, unsigned workers) {
    if (N == 0) throw std::invalid_argument("sweep_reports: N must be >= 1");
    std::vector<MomentPlan> plans;
    plans.reserve(dt_grid.size());
    std::vector<double> times;
    for (double dt : dt_grid) {
        plans.emplace_back(k, dt);
        // j = 0 is B(0) = 1 and needs no evaluation.
        for (unsigned j = 1; j <= k; ++j) times.push_back(j * dt);
    }
    const auto values = char_fn_grid(cfg, times, workers);
    const double exact = exact_moment(cfg, k);

    std::vector<EstimatorReport> reports;
    reports.reserve(plans.size());
    std::vector<CharValue> b(k + 1);
    for (std::size_t g = 0; g < plans.size(); ++g) {
        b[0] = CharValue{0.0, 1.0, 0.0};
        for (unsigned j = 1; j <= k; ++j) b[j] = values[g * k + (j - 1)];
        reports.push_back(report_from(plans[g], b, exact, cfg.size(), N));
    }
    return reports;
}

OptimalDt argmin_relative(std::span<const EstimatorReport> reports) {
    if (reports.size() < 3) throw std::invalid_argument("optimal_dt: grid needs at least 3 points");
    std::size_t best = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (!reports[i].relative_uncertainty) {
            throw std::domain_error("optimal_dt: relative uncertainty undefined (exact moment is zero)");
        }
        if (*reports[i].relative_uncertainty < *reports[best].relative_uncertainty) best = i;
    }
    return OptimalDt{reports[best].dt, best, reports[best]};
}

OptimalDt optimal_dt(const FieldConfig& cfg, unsigned k, std::uint64_t N, std::span<const double> dt_grid,
                     unsigned workers) {
    if (dt_grid.size() < 3) throw std::invalid_argument("optimal_dt: grid needs at least 3 points");
    for (std::size_t i = 0; i < dt_grid.size(); ++i) {
        if (!(dt_grid[i] > 0.0) || (i > 0 && !(dt_grid[i] > dt_grid[i - 1]))) {
            throw std::invalid_argument("optimal_dt: grid must be strictly ascending and positive");
        }
    }
    const auto reports = sweep_reports(cfg, k, N, dt_grid, workers);
    return argmin_relative(reports);
}

std::string csv_header() {
    return "L,k,dt,N,expectation,variance,systematic_error,total_uncertainty,relative_uncertainty";
}

std::string to_csv_row(const EstimatorReport& r) {
    std::string row;
    row += std::to_string(r.L) + ',' + std::to_string(r.k) + ',' + format_double(r.dt) + ',' +
           std::to_string(r.n_repeats) + ',';
    row += format_double(r.expectation) + ',' + format_double(r.variance) + ',' +
           format_double(r.systematic_error) + ',' + format_double(r.total_uncertainty) + ',';
    row += r.relative_uncertainty ? format_double(*r.relative_uncertainty) : std::string("nan");
    return row;
}

}  // namespace anonsense
