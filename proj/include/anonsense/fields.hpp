#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace anonsense {

// Resonant frequencies omega_l (rad per unit time, hbar = 1) of the L sensor
// sites. Immutable after construction.
class FieldConfig {
public:
    // Throws std::invalid_argument when empty or when any value is not finite.
    explicit FieldConfig(std::vector<double> omegas);

    std::span<const double> omegas() const noexcept { return omegas_; }
    std::size_t size() const noexcept { return omegas_.size(); }
    double operator[](std::size_t l) const noexcept { return omegas_[l]; }
    double max_omega() const noexcept;

    friend bool operator==(const FieldConfig&, const FieldConfig&) = default;

private:
    std::vector<double> omegas_;
};

struct UniformFieldDistribution {
    double omega_min = 1.0;
    double omega_max = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// L i.i.d. draws on [omega_min, omega_max) from CounterRng(seed, 0); draw l
// depends only on (seed, l).
FieldConfig draw_fields(const UniformFieldDistribution& dist, std::size_t L);

// (1/L) sum_l omega_l^k. k = 0 returns exactly 1; constant fields return c^k
// exactly.
double exact_moment(const FieldConfig& cfg, unsigned k);

// Plain text: one frequency per line, shortest round-trip decimal. Blank lines
// and lines starting with '#' are ignored on input.
std::string to_text(const FieldConfig& cfg);
FieldConfig fields_from_text(std::string_view text);

nlohmann::json to_json(const FieldConfig& cfg);
FieldConfig fields_from_json(const nlohmann::json& j);

// Loads either format, choosing JSON when the first non-space character is '['.
FieldConfig load_fields(const std::string& path);
void save_fields(const FieldConfig& cfg, const std::string& path);

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

}  // namespace anonsense
