#include "anonsense/anonymity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace anonsense {

std::uint64_t sum_of_squares(unsigned k) {
    const std::uint64_t kk = k;
    return kk * (kk + 1) * (2 * kk + 1) / 6;
}

std::vector<double> UniformMatrix::dense() const {
    std::vector<double> m(n * n, offdiag);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = diag;
    return m;
}

namespace {
void check_matrix_args(std::size_t L, unsigned k, double dt) {
    if (L < 2) throw std::invalid_argument("QFI matrix needs L >= 2");
    if (k == 0) throw std::invalid_argument("QFI matrix needs k >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("QFI matrix needs dt > 0");
}
}  // namespace

UniformMatrix qfi_matrix(std::size_t L, unsigned k, double dt) {
    check_matrix_args(L, k, dt);
    const double l = static_cast<double>(L);
    const double scale = dt * dt * static_cast<double>(sum_of_squares(k)) / (l * l);
    return {L, (2.0 * l - 1.0) * scale, -scale};
}

UniformMatrix qfi_inverse(std::size_t L, unsigned k, double dt) {
    check_matrix_args(L, k, dt);
    const double denom = 2.0 * dt * dt * static_cast<double>(sum_of_squares(k));
    return {L, (1.0 + static_cast<double>(L)) / denom, 1.0 / denom};
}

SecurityMargin security_margin(std::size_t L, unsigned k, std::uint64_t N) {
    if (L == 0 || k == 0 || N == 0) throw std::invalid_argument("security_margin: inputs must be positive");
    const double bound = std::sqrt((static_cast<double>(L) + 1.0) /
                                   (2.0 * static_cast<double>(N) * static_cast<double>(sum_of_squares(k))));
    return {bound, bound >= std::numbers::pi};
}

std::uint64_t max_secure_N(std::size_t L, unsigned k) {
    if (L == 0 || k == 0) throw std::invalid_argument("max_secure_N: inputs must be positive");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    auto n = static_cast<std::uint64_t>(
        std::floor((static_cast<double>(L) + 1.0) / (2.0 * pi2 * static_cast<double>(sum_of_squares(k)))));
    // Settle rounding at the boundary against the predicate itself.
    while (n > 0 && !security_margin(L, k, n).secure) --n;
    while (security_margin(L, k, n + 1).secure) ++n;
    return n;
}

QfiReport qfi_report(std::size_t L, unsigned k, double dt, std::uint64_t N) {
    const auto f = qfi_matrix(L, k, dt);
    const auto inv = qfi_inverse(L, k, dt);
    const auto margin = security_margin(L, k, N);
    QfiReport r;
    r.L = L;
    r.k = k;
    r.dt = dt;
    r.n_repeats = N;
    r.qfi_diag = f.diag;
    r.qfi_offdiag = f.offdiag;
    r.inv_diag = inv.diag;
    r.inv_offdiag = inv.offdiag;
    r.phase_bound = margin.phase_bound;
    r.freq_bound = margin.phase_bound / dt;
    r.secure = margin.secure;
    return r;
}

nlohmann::json to_json(const QfiReport& r) {
    return nlohmann::json{
        {"L", r.L},
        {"k", r.k},
        {"dt", r.dt},
        {"N", r.n_repeats},
        {"qfi_diag", r.qfi_diag},
        {"qfi_offdiag", r.qfi_offdiag},
        {"inv_diag", r.inv_diag},
        {"inv_offdiag", r.inv_offdiag},
        {"freq_bound", r.freq_bound},
        {"phase_bound", r.phase_bound},
        {"secure", r.secure},
    };
}

}  // namespace anonsense
