#include "anonsense/statevec.hpp"

#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "anonsense/protocol_sim.hpp"

using namespace anonsense;
using namespace std::complex_literals;

namespace {

double max_abs_diff(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

FieldConfig random_fields(std::mt19937_64& gen, std::size_t L) {
    std::uniform_real_distribution<double> u(1.0, 5.0);
    std::vector<double> w(L);
    for (auto& x : w) x = u(gen);
    return FieldConfig(w);
}

}  // namespace

TEST(Statevec, PrepareInitialTwoSites) {
    const auto s = ProtocolState::prepare_initial(2);
    ASSERT_EQ(s.dimension(), 16u);
    EXPECT_EQ(s.register_qubits(), 1u);
    EXPECT_NEAR(s.norm(), 1.0, 1e-15);
    // (1/sqrt 2) sum_l |l>|+>|00>: indices r<<3 | d<<2.
    std::vector<Amplitude> expected(16);
    for (std::size_t idx : {0u, 4u, 8u, 12u}) expected[idx] = 0.5;
    EXPECT_LT(max_abs_diff(s.amplitudes(), expected), 1e-15);
}

TEST(Statevec, PrepareInitialEdgeCases) {
    const auto one = ProtocolState::prepare_initial(1);
    EXPECT_EQ(one.register_qubits(), 0u);
    EXPECT_EQ(one.dimension(), 4u);
    EXPECT_THROW(ProtocolState::prepare_initial(32), std::invalid_argument);
    EXPECT_THROW(ProtocolState::prepare_initial(3), std::invalid_argument);
    EXPECT_THROW(ProtocolState::prepare_initial(0), std::invalid_argument);
}

TEST(Statevec, CswapMatchesHandExpansionAndIsInvolution) {
    auto s = ProtocolState::prepare_initial(2);
    const std::vector<Amplitude> before(s.amplitudes().begin(), s.amplitudes().end());
    s.apply_cswap();
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
    // (1/sqrt 2) sum_l |l>|0>_d |+>_l: sensor 0 for r = 0, sensor 1 for r = 1.
    std::vector<Amplitude> expected(16);
    for (std::size_t idx : {0u, 1u, 8u, 10u}) expected[idx] = 0.5;
    EXPECT_LT(max_abs_diff(s.amplitudes(), expected), 1e-15);
    s.apply_cswap();
    EXPECT_LT(max_abs_diff(s.amplitudes(), before), 1e-13);
}

TEST(Statevec, FieldEvolutionHandExpansion) {
    const FieldConfig cfg({1.0, 5.0});
    const double t = 0.3;
    auto s = ProtocolState::prepare_initial(2);
    s.apply_cswap();
    s.apply_field_evolution(cfg, t);
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
    std::vector<Amplitude> expected(16);
    expected[0] = 0.5;
    expected[1] = 0.5 * std::exp(1i * 1.0 * t);
    expected[8] = 0.5;
    expected[10] = 0.5 * std::exp(1i * 5.0 * t);
    EXPECT_LT(max_deviation_up_to_phase(expected, s.amplitudes()), 1e-14);
}

TEST(Statevec, FieldEvolutionAtZeroTimeIsIdentity) {
    auto s = ProtocolState::prepare_initial(4);
    s.apply_cswap();
    const std::vector<Amplitude> before(s.amplitudes().begin(), s.amplitudes().end());
    s.apply_field_evolution(FieldConfig({1.0, 2.0, 3.0, 4.0}), 0.0);
    EXPECT_LT(max_abs_diff(s.amplitudes(), before), 1e-15);
    EXPECT_THROW(s.apply_field_evolution(FieldConfig({1.0}), 0.1), std::invalid_argument);
}

TEST(Statevec, PipelineMatchesAnalyticState) {
    const FieldConfig cfg({1.0, 5.0});
    const auto numeric = run_single_copy_pipeline(cfg, 0.3);
    const auto analytic = analytic_reduced_state(cfg, 0.3);
    EXPECT_LT(max_deviation_up_to_phase(analytic, numeric), 1e-12);

    const auto flat = run_single_copy_pipeline(cfg, 0.0);
    for (const auto& a : flat) EXPECT_NEAR(std::abs(a), 0.5, 1e-15);
}

TEST(Statevec, PipelineFidelityRandomised) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> ut(-4.0, 4.0);
    for (std::size_t L : {1u, 2u, 4u, 8u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto cfg = random_fields(gen, L);
            const double t = ut(gen);
            EXPECT_GE(fidelity(analytic_reduced_state(cfg, t), run_single_copy_pipeline(cfg, t)), 1.0 - 1e-12);
        }
    }
}

TEST(Statevec, ReducedStateDetectsEntangledSensors) {
    auto s = ProtocolState::prepare_initial(2);
    s.apply_cswap();
    EXPECT_THROW(s.reduced_final_state(), std::runtime_error);
}

TEST(Povm, AllPlusAtZeroTime) {
    const FieldConfig cfg({2.0, 3.0, 4.0, 5.0});
    const auto p = povm_probabilities(run_single_copy_pipeline(cfg, 0.0), plus_x());
    EXPECT_NEAR(p.p1, 1.0, 1e-14);
    EXPECT_NEAR(p.p2, 0.0, 1e-14);
}

TEST(Povm, MatchesOutcomeModelAndExtractsReIm) {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> ut(-3.0, 3.0);
    for (std::size_t L : {2u, 4u, 8u}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto cfg = random_fields(gen, L);
            const double t = ut(gen);
            const auto rd = run_single_copy_pipeline(cfg, t);
            const auto px = outcome_distribution(cfg, t, Basis::x);
            const auto py = outcome_distribution(cfg, t, Basis::y);
            const double ppx = povm_probabilities(rd, plus_x()).p1;
            const double pmx = povm_probabilities(rd, minus_x()).p1;
            const double ppy = povm_probabilities(rd, plus_y()).p1;
            const double pmy = povm_probabilities(rd, minus_y()).p1;
            EXPECT_NEAR(ppx, px.p_plus, 1e-12);
            EXPECT_NEAR(pmx, px.p_minus, 1e-12);
            EXPECT_NEAR(ppy, py.p_plus, 1e-12);
            EXPECT_NEAR(pmy, py.p_minus, 1e-12);
            const auto b = char_fn(cfg, t);
            EXPECT_NEAR(ppx - pmx, b.re, 1e-12);
            EXPECT_NEAR(ppy - pmy, b.im, 1e-12);

            const auto a = analytic_a_ket(cfg, t);
            const auto psi = plus_y();
            const double direct = std::norm(std::conj(psi[0]) * a[0] + std::conj(psi[1]) * a[1]);
            EXPECT_NEAR(ppy, direct, 1e-12);
        }
    }
}

TEST(Povm, SuccessProbabilityIsSwapSymmetric) {
    const FieldConfig cfg({1.0, 2.0, 3.0, 4.0});
    const FieldConfig swapped({4.0, 2.0, 3.0, 1.0});
    for (const auto& psi : {plus_x(), minus_x(), plus_y(), minus_y()}) {
        EXPECT_NEAR(povm_probabilities(run_single_copy_pipeline(cfg, 0.7), psi).p1,
                    povm_probabilities(run_single_copy_pipeline(swapped, 0.7), psi).p1, 1e-14);
    }
}

TEST(Povm, FailureBranchIsNotSwapSymmetric) {
    const FieldConfig cfg({1.0, 5.0});
    const FieldConfig swapped({5.0, 1.0});
    const double t = 0.3;
    const auto rd = run_single_copy_pipeline(cfg, t);
    const auto rd_swapped = run_single_copy_pipeline(swapped, t);

    const auto ok = post_povm_state(rd, plus_x(), 1);
    const auto ok_swapped = post_povm_state(rd_swapped, plus_x(), 1);
    EXPECT_GE(fidelity(ok, ok_swapped), 1.0 - 1e-12);

    const auto fail = post_povm_state(rd, plus_x(), 2);
    const auto fail_swapped = post_povm_state(rd_swapped, plus_x(), 2);
    EXPECT_LT(fidelity(fail, fail_swapped), 0.99);
}

TEST(Povm, RejectsBadInputs) {
    const auto rd = run_single_copy_pipeline(FieldConfig({1.0, 5.0}), 0.3);
    EXPECT_THROW(povm_probabilities(rd, DataQubitState{1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(post_povm_state(rd, plus_x(), 3), std::invalid_argument);
}
