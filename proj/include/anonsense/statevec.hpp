#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "anonsense/fields.hpp"

namespace anonsense {

using Amplitude = std::complex<double>;
using DataQubitState = std::array<Amplitude, 2>;

inline constexpr std::size_t kMaxOracleSites = 16;

// Dense pure state of one protocol copy: log2(L) register qubits, one data
// qubit and L sensor qubits. Basis index layout (most significant first):
//
//   [ register r : log2 L bits ][ data d : 1 bit ][ sensor L-1 ... sensor 0 ]
//
// so sensor l is bit l, the data qubit is bit L and the register value is
// index >> (L + 1).
class ProtocolState {
public:
    // (1/sqrt L) sum_l |l>_r |+>_d |0^L>_s. L must be a power of two <= 16;
    // L = 1 has no register qubits. Throws std::invalid_argument otherwise.
    static ProtocolState prepare_initial(std::size_t L);

    std::size_t sites() const noexcept { return sites_; }
    unsigned register_qubits() const noexcept { return register_qubits_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    double norm() const noexcept;

    // sum_l |l><l|_r (x) SWAP(data, sensor l). Self-inverse.
    void apply_cswap();

    // (x)_l exp(-i omega_l t sigma_z / 2) on the sensors. The exact unitary is
    // applied; its global phase prod_l exp(-i omega_l t / 2) is not stripped.
    void apply_field_evolution(const FieldConfig& cfg, double t);

    // Register (x) data amplitudes (index (r << 1) | d) of the sensors = |0^L>
    // slice. Throws std::runtime_error if more than `tolerance` of the norm
    // lies outside that slice, i.e. the sensors are still entangled.
    std::vector<Amplitude> reduced_final_state(double tolerance = 1e-12) const;

private:
    ProtocolState(std::size_t L, unsigned register_qubits);

    std::size_t sites_;
    unsigned register_qubits_;
    std::vector<Amplitude> amps_;
};

// prepare -> CSWAP -> field evolution for time t -> CSWAP -> reduce.
std::vector<Amplitude> run_single_copy_pipeline(const FieldConfig& cfg, double t);

// (1/sqrt L) sum_l |l>_r |+_{omega_l t}>_d with |+_theta> = (|0> + e^{i theta}|1>)/sqrt 2.
std::vector<Amplitude> analytic_reduced_state(const FieldConfig& cfg, double t);

// (|0> + B(t)|1>) / sqrt 2: the data-qubit vector after projecting the
// register onto the all-plus state (unnormalised).
DataQubitState analytic_a_ket(const FieldConfig& cfg, double t);

double fidelity(std::span<const Amplitude> a, std::span<const Amplitude> b);

// Largest per-amplitude deviation after removing the best-fit global phase.
double max_deviation_up_to_phase(std::span<const Amplitude> reference, std::span<const Amplitude> v);

DataQubitState plus_x();
DataQubitState minus_x();
DataQubitState plus_y();
DataQubitState minus_y();

struct PovmProbabilities {
    double p1 = 0.0;
    double p2 = 0.0;
};

// POVM(psi): M1 = |+..+><+..+|_r (x) |psi><psi|_d, M2 = I - M1, evaluated on a
// register (x) data state. psi must be normalised.
PovmProbabilities povm_probabilities(std::span<const Amplitude> state_rd, const DataQubitState& psi);

// Normalised post-measurement state for outcome 1 or 2.
std::vector<Amplitude> post_povm_state(std::span<const Amplitude> state_rd, const DataQubitState& psi,
                                       int outcome);

}  // namespace anonsense
