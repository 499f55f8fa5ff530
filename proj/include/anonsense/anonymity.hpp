#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

namespace anonsense {

// sum_{j=1}^k j^2 = k(k+1)(2k+1)/6.
std::uint64_t sum_of_squares(unsigned k);

// Symmetric L x L matrix with one diagonal and one off-diagonal value,
// i.e. offdiag * J + (diag - offdiag) * I.
struct UniformMatrix {
    std::size_t n = 0;
    double diag = 0.0;
    double offdiag = 0.0;

    // Row-major dense copy, for validation.
    std::vector<double> dense() const;
};

// F_{l,l'} = (2L delta - 1) / L^2 * dt^2 * sum j^2. Throws
// std::invalid_argument for L < 2, k = 0 or dt <= 0.
UniformMatrix qfi_matrix(std::size_t L, unsigned k, double dt);

// (F^-1)_{l,l'} = (1 + L delta) / (2 dt^2 sum j^2).
UniformMatrix qfi_inverse(std::size_t L, unsigned k, double dt);

struct SecurityMargin {
    double phase_bound = 0.0;
    bool secure = false;
};

// phase_bound = sqrt((L+1) / (2 N sum j^2)); secure when >= pi. Valid for L >= 1.
SecurityMargin security_margin(std::size_t L, unsigned k, std::uint64_t N);

// Largest N with security_margin(L, k, N).secure, or 0 when none exists.
std::uint64_t max_secure_N(std::size_t L, unsigned k);

struct QfiReport {
    std::size_t L = 0;
    unsigned k = 0;
    double dt = 0.0;
    std::uint64_t n_repeats = 0;
    double qfi_diag = 0.0;
    double qfi_offdiag = 0.0;
    double inv_diag = 0.0;
    double inv_offdiag = 0.0;
    double freq_bound = 0.0;
    double phase_bound = 0.0;
    bool secure = false;
};

QfiReport qfi_report(std::size_t L, unsigned k, double dt, std::uint64_t N);

nlohmann::json to_json(const QfiReport& r);

}  // namespace anonsense
