#include "anonsense/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "anonsense/anonymity.hpp"
#include "anonsense/fields.hpp"
#include "anonsense/protocol_sim.hpp"
#include "anonsense/rng.hpp"
#include "anonsense/statevec.hpp"

namespace anonsense {

bool ValidationReport::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name << ": observed " << format_double(c.observed)
           << ", expected " << format_double(c.expected);
        if (!c.detail.empty()) os << " (" << c.detail << ')';
        os << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const ValidationReport& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"observed", c.observed},
                          {"expected", c.expected},
                          {"detail", c.detail}});
    }
    return {{"passed", report.passed()}, {"checks", checks}};
}

double per_copy_variance(const MomentPlan& plan, std::span<const CharValue> b) {
    if (b.size() != plan.copies()) throw std::invalid_argument("per_copy_variance: need B(j dt), j = 0..k");
    const Basis basis = plan.parity() == Parity::even ? Basis::x : Basis::y;
    // Pascal's rule, independent of binomial().
    std::vector<double> row{1.0};
    for (unsigned n = 1; n <= plan.order(); ++n) {
        std::vector<double> next(n + 1, 1.0);
        for (unsigned j = 1; j < n; ++j) next[j] = row[j - 1] + row[j];
        row = std::move(next);
    }
    const double scale = std::pow(plan.dt(), static_cast<double>(plan.order()));
    double total = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const auto d = outcome_distribution(b[j], basis);
        const double w = row[j] / scale;
        total += w * w * (d.second_moment() - d.mean() * d.mean());
    }
    return total;
}

namespace {

constexpr std::uint64_t kTimeStream = 0x7469'6d65;  // draws of evaluation times

CheckResult make_check(std::string name, bool passed, double observed, double expected, std::string detail = {}) {
    return CheckResult{std::move(name), passed, observed, expected, std::move(detail)};
}

FieldConfig random_fields(const ValidationOptions& opt, std::uint64_t salt, std::size_t L) {
    return draw_fields(UniformFieldDistribution{opt.omega_min, opt.omega_max, opt.seed ^ splitmix64_mix(salt)}, L);
}

}  // namespace

std::vector<CheckResult> check_oracle_equivalence(const ValidationOptions& opt) {
    for (std::size_t L : opt.oracle_sites) {
        if (L == 0 || !std::has_single_bit(L) || L > kMaxOracleSites) {
            throw std::invalid_argument("validate: oracle site count " + std::to_string(L) +
                                        " must be a power of two <= 16");
        }
    }
    std::vector<CheckResult> out;
    for (std::size_t L : opt.oracle_sites) {
        const CounterRng time_rng(opt.seed ^ kTimeStream, L);
        double worst_fidelity_gap = 0.0;
        double worst_amplitude = 0.0;
        double worst_povm = 0.0;
        double worst_extraction = 0.0;
        double worst_norm = 0.0;
        for (std::size_t trial = 0; trial < opt.trials; ++trial) {
            const auto cfg = random_fields(opt, (L << 20) + trial, L);
            const double t = 3.0 * time_rng.unit_at(trial);

            auto state = ProtocolState::prepare_initial(L);
            worst_norm = std::max(worst_norm, std::abs(state.norm() - 1.0));
            state.apply_cswap();
            worst_norm = std::max(worst_norm, std::abs(state.norm() - 1.0));
            state.apply_field_evolution(cfg, t);
            worst_norm = std::max(worst_norm, std::abs(state.norm() - 1.0));
            state.apply_cswap();
            worst_norm = std::max(worst_norm, std::abs(state.norm() - 1.0));
            const auto numeric = state.reduced_final_state();

            const auto analytic = analytic_reduced_state(cfg, t);
            worst_fidelity_gap = std::max(worst_fidelity_gap, 1.0 - fidelity(analytic, numeric));
            worst_amplitude = std::max(worst_amplitude, max_deviation_up_to_phase(analytic, numeric));

            const auto b = char_fn(cfg, t);
            const auto px = outcome_distribution(b, Basis::x);
            const auto py = outcome_distribution(b, Basis::y);
            const double p_plus_x = povm_probabilities(numeric, plus_x()).p1;
            const double p_minus_x = povm_probabilities(numeric, minus_x()).p1;
            const double p_plus_y = povm_probabilities(numeric, plus_y()).p1;
            const double p_minus_y = povm_probabilities(numeric, minus_y()).p1;
            worst_povm = std::max({worst_povm, std::abs(p_plus_x - px.p_plus), std::abs(p_minus_x - px.p_minus),
                                   std::abs(p_plus_y - py.p_plus), std::abs(p_minus_y - py.p_minus)});
            worst_extraction = std::max(
                {worst_extraction, std::abs((p_plus_x - p_minus_x) - b.re), std::abs((p_plus_y - p_minus_y) - b.im)});
        }
        const std::string suffix = " L=" + std::to_string(L);
        out.push_back(make_check("oracle fidelity gap" + suffix, worst_fidelity_gap <= 1e-12, worst_fidelity_gap,
                                 1e-12, "1 - |<analytic|numeric>|^2, worst of trials"));
        out.push_back(make_check("oracle amplitude deviation" + suffix, worst_amplitude <= 1e-12, worst_amplitude,
                                 1e-12, "up to global phase"));
        out.push_back(make_check("povm probabilities" + suffix, worst_povm <= 1e-12, worst_povm, 1e-12,
                                 "P_{+-,x}, P_{+-,y} vs (1 + |B|^2 +- 2A)/4"));
        out.push_back(make_check("Re/Im extraction" + suffix, worst_extraction <= 1e-12, worst_extraction, 1e-12,
                                 "P_+ - P_- vs Re B / Im B"));
        out.push_back(make_check("norm preservation" + suffix, worst_norm <= 1e-13, worst_norm, 1e-13));
    }
    return out;
}

CheckResult check_variance_identity(const ValidationOptions& opt, const VarianceRoutine& variance) {
    const CounterRng rng(opt.seed ^ 0x7661'7269, 0);
    double worst = 0.0;
    std::uint64_t draw = 0;
    for (std::size_t c = 0; c < opt.variance_configs; ++c) {
        const std::size_t L = 1 + static_cast<std::size_t>(rng.unit_at(draw++) * 64.0);
        const auto cfg = random_fields(opt, 0x5641'0000 + c, L);
        for (unsigned k = 1; k <= 4; ++k) {
            const double hi = dt_max(opt.omega_max, k);
            const double dt = 0.05 + (hi - 0.05) * rng.unit_at(draw++);
            const MomentPlan plan(k, dt);
            const auto times = plan.copy_times();
            const auto b = char_fn_grid(cfg, times, 1);
            const double oracle = per_copy_variance(plan, b);
            const double printed = variance(plan, b);
            const double rel = std::abs(printed - oracle) / std::max(std::abs(oracle), 1e-300);
            worst = std::max(worst, rel);
        }
    }
    return make_check("variance closed form vs per-copy oracle", worst <= 1e-10, worst, 1e-10,
                      std::to_string(opt.variance_configs) + " configs, k = 1..4, relative");
}

CheckResult check_consistency_triangle(const ValidationOptions& opt) {
    double worst = 0.0;
    for (std::size_t c = 0; c < 10; ++c) {
        const auto cfg = random_fields(opt, 0x5452'0000 + c, 16);
        for (unsigned k = 1; k <= 4; ++k) {
            const double dt = 0.1 + 0.05 * static_cast<double>(c);
            const MomentPlan plan(k, dt);
            const double expectation = expectation_C(cfg, plan);
            const double fd = plan.moment_sign() * fd_moment(cfg, k, dt);
            double direct = 0.0;
            for (unsigned j = 0; j <= k; ++j) {
                const auto b = char_fn(cfg, j * dt);
                const double a = k % 2 == 0 ? b.re : b.im;
                const double sign = (k + j) % 2 == 0 ? 1.0 : -1.0;
                direct += sign * static_cast<double>(binomial(k, j)) * a;
            }
            direct /= std::pow(dt, static_cast<double>(k));
            const double scale = std::max(1.0, std::abs(expectation));
            worst = std::max({worst, std::abs(expectation - fd) / scale, std::abs(expectation - direct) / scale});
        }
    }
    return make_check("expectation / fd_moment / direct difference", worst <= 1e-12, worst, 1e-12);
}

CheckResult check_qfi_inverse(const ValidationOptions& opt) {
    double worst = 0.0;
    const std::size_t dense_sizes[] = {2, 3, 4, 5, 8, 16, 33, 64, 100, 128, 200, 256};
    for (std::size_t L : dense_sizes) {
        if (L > opt.qfi_dense_max) continue;
        for (unsigned k : {1u, 3u}) {
            const double dt = k == 1 ? 1.0 : 0.3;
            const auto f = qfi_matrix(L, k, dt).dense();
            const auto g = qfi_inverse(L, k, dt).dense();
            for (std::size_t i = 0; i < L; ++i) {
                for (std::size_t j = 0; j < L; ++j) {
                    double s = 0.0;
                    for (std::size_t m = 0; m < L; ++m) s += f[i * L + m] * g[m * L + j];
                    worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
                }
            }
        }
    }
    // (aI + bJ)(cI + dJ) = ac I + (ad + bc + L bd) J.
    for (std::size_t L = 2; L <= 1024; L *= 2) {
        const auto f = qfi_matrix(L, 2, 0.7);
        const auto g = qfi_inverse(L, 2, 0.7);
        const double a = f.diag - f.offdiag, b = f.offdiag;
        const double c = g.diag - g.offdiag, d = g.offdiag;
        const double identity_part = a * c;
        const double ones_part = a * d + b * c + static_cast<double>(L) * b * d;
        worst = std::max({worst, std::abs(identity_part + ones_part - 1.0), std::abs(ones_part)});
    }
    return make_check("QFI inverse", worst <= 1e-10, worst, 1e-10, "max |F F^-1 - I|");
}

ValidationReport run_validate(const ValidationOptions& opt) {
    ValidationReport report;
    report.checks = check_oracle_equivalence(opt);
    report.checks.push_back(check_variance_identity(opt, variance_from));
    report.checks.push_back(check_consistency_triangle(opt));
    report.checks.push_back(check_qfi_inverse(opt));
    return report;
}

}  // namespace anonsense
