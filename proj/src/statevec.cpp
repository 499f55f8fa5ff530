#include "anonsense/statevec.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "anonsense/charfn.hpp"

namespace anonsense {

namespace {

double squared_norm(std::span<const Amplitude> v) noexcept {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

Amplitude inner(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner product of mismatched states");
    Amplitude s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

std::size_t sites_of_reduced(std::span<const Amplitude> state_rd) {
    const std::size_t L = state_rd.size() / 2;
    if (state_rd.size() < 2 || state_rd.size() % 2 != 0 || !std::has_single_bit(L)) {
        throw std::invalid_argument("register (x) data state must have 2L amplitudes, L a power of two");
    }
    return L;
}

// Data-qubit vector <+..+|_r phi.
DataQubitState project_register_plus(std::span<const Amplitude> state_rd) {
    const std::size_t L = sites_of_reduced(state_rd);
    const double amp = 1.0 / std::sqrt(static_cast<double>(L));
    DataQubitState v{0.0, 0.0};
    for (std::size_t r = 0; r < L; ++r) {
        v[0] += amp * state_rd[r << 1];
        v[1] += amp * state_rd[(r << 1) | 1];
    }
    return v;
}

}  // namespace

ProtocolState::ProtocolState(std::size_t L, unsigned register_qubits)
    : sites_(L), register_qubits_(register_qubits), amps_(std::size_t{1} << (register_qubits + 1 + L)) {}

ProtocolState ProtocolState::prepare_initial(std::size_t L) {
    if (L == 0 || !std::has_single_bit(L)) {
        throw std::invalid_argument("prepare_initial: L must be a power of two");
    }
    if (L > kMaxOracleSites) {
        throw std::invalid_argument("prepare_initial: L exceeds the dense oracle limit of 16 sites");
    }
    const auto n = static_cast<unsigned>(std::countr_zero(L));
    ProtocolState s(L, n);
    const double amp = 1.0 / std::sqrt(2.0 * static_cast<double>(L));
    for (std::size_t r = 0; r < L; ++r) {
        for (std::size_t d = 0; d < 2; ++d) s.amps_[(r << (L + 1)) | (d << L)] = amp;
    }
    return s;
}

double ProtocolState::norm() const noexcept { return std::sqrt(squared_norm(amps_)); }

void ProtocolState::apply_cswap() {
    const std::size_t L = sites_;
    const std::size_t data_bit = std::size_t{1} << L;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const std::size_t r = i >> (L + 1);
        const std::size_t sensor_bit = std::size_t{1} << r;
        // Visit each swapped pair once, from the data = 1, sensor = 0 side.
        if ((i & data_bit) != 0 && (i & sensor_bit) == 0) {
            std::swap(amps_[i], amps_[(i & ~data_bit) | sensor_bit]);
        }
    }
}

void ProtocolState::apply_field_evolution(const FieldConfig& cfg, double t) {
    const std::size_t L = sites_;
    if (cfg.size() != L) throw std::invalid_argument("apply_field_evolution: field count != sensor count");
    const std::size_t sensor_states = std::size_t{1} << L;
    // Phase for each sensor bit pattern: sum_l (bit_l ? +1 : -1) omega_l t / 2.
    std::vector<Amplitude> phase(sensor_states);
    for (std::size_t s = 0; s < sensor_states; ++s) {
        double angle = 0.0;
        for (std::size_t l = 0; l < L; ++l) angle += ((s >> l) & 1u ? 0.5 : -0.5) * cfg[l] * t;
        phase[s] = std::polar(1.0, angle);
    }
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] *= phase[i & (sensor_states - 1)];
}

std::vector<Amplitude> ProtocolState::reduced_final_state(double tolerance) const {
    const std::size_t L = sites_;
    const std::size_t sensor_mask = (std::size_t{1} << L) - 1;
    std::vector<Amplitude> out(2 * L);
    double leaked = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & sensor_mask) == 0) {
            out[i >> L] = amps_[i];
        } else {
            leaked += std::norm(amps_[i]);
        }
    }
    if (leaked > tolerance) {
        throw std::runtime_error("reduced_final_state: sensor qubits are not in |0...0> (leaked norm " +
                                 std::to_string(leaked) + ")");
    }
    return out;
}

std::vector<Amplitude> run_single_copy_pipeline(const FieldConfig& cfg, double t) {
    auto state = ProtocolState::prepare_initial(cfg.size());
    state.apply_cswap();
    state.apply_field_evolution(cfg, t);
    state.apply_cswap();
    return state.reduced_final_state();
}

std::vector<Amplitude> analytic_reduced_state(const FieldConfig& cfg, double t) {
    const std::size_t L = cfg.size();
    const double amp = 1.0 / std::sqrt(2.0 * static_cast<double>(L));
    std::vector<Amplitude> out(2 * L);
    for (std::size_t l = 0; l < L; ++l) {
        out[l << 1] = amp;
        out[(l << 1) | 1] = amp * std::polar(1.0, cfg[l] * t);
    }
    return out;
}

DataQubitState analytic_a_ket(const FieldConfig& cfg, double t) {
    const double s = std::numbers::sqrt2 / 2.0;
    return {Amplitude{s, 0.0}, s * char_fn(cfg, t).value()};
}

double fidelity(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    return std::norm(inner(a, b)) / (squared_norm(a) * squared_norm(b));
}

double max_deviation_up_to_phase(std::span<const Amplitude> reference, std::span<const Amplitude> v) {
    const Amplitude overlap = inner(reference, v);
    const Amplitude align = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : Amplitude{1.0};
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i] * align - reference[i]));
    return worst;
}

DataQubitState plus_x() { return {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0}; }
DataQubitState minus_x() { return {std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0}; }
DataQubitState plus_y() { return {std::numbers::sqrt2 / 2.0, Amplitude{0.0, std::numbers::sqrt2 / 2.0}}; }
DataQubitState minus_y() { return {std::numbers::sqrt2 / 2.0, Amplitude{0.0, -std::numbers::sqrt2 / 2.0}}; }

PovmProbabilities povm_probabilities(std::span<const Amplitude> state_rd, const DataQubitState& psi) {
    const double psi_norm = std::norm(psi[0]) + std::norm(psi[1]);
    if (std::abs(psi_norm - 1.0) > 1e-12) throw std::invalid_argument("povm_probabilities: psi is not normalised");
    const auto v = project_register_plus(state_rd);
    const double p1 = std::norm(std::conj(psi[0]) * v[0] + std::conj(psi[1]) * v[1]);
    return {p1, squared_norm(state_rd) - p1};
}

std::vector<Amplitude> post_povm_state(std::span<const Amplitude> state_rd, const DataQubitState& psi,
                                       int outcome) {
    if (outcome != 1 && outcome != 2) throw std::invalid_argument("post_povm_state: outcome must be 1 or 2");
    const std::size_t L = sites_of_reduced(state_rd);
    const auto v = project_register_plus(state_rd);
    const Amplitude overlap = std::conj(psi[0]) * v[0] + std::conj(psi[1]) * v[1];
    // M1 phi = |+..+>_r |psi>_d <psi|v>.
    const double amp = 1.0 / std::sqrt(static_cast<double>(L));
    std::vector<Amplitude> m1(2 * L);
    for (std::size_t r = 0; r < L; ++r) {
        m1[r << 1] = amp * psi[0] * overlap;
        m1[(r << 1) | 1] = amp * psi[1] * overlap;
    }
    std::vector<Amplitude> out(2 * L);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = outcome == 1 ? m1[i] : state_rd[i] - m1[i];
    const double n = std::sqrt(squared_norm(out));
    if (n == 0.0) throw std::domain_error("post_povm_state: outcome has zero probability");
    for (auto& a : out) a /= n;
    return out;
}

}  // namespace anonsense
