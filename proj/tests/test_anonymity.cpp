#include "anonsense/anonymity.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

using namespace anonsense;

namespace {

Eigen::MatrixXd to_eigen(const UniformMatrix& m) {
    const auto d = m.dense();
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        d.data(), static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
}

}  // namespace

TEST(Qfi, SumOfSquares) {
    EXPECT_EQ(sum_of_squares(1), 1u);
    EXPECT_EQ(sum_of_squares(2), 5u);
    EXPECT_EQ(sum_of_squares(4), 30u);
}

TEST(Qfi, TwoSiteExactValues) {
    const auto f = qfi_matrix(2, 1, 1.0);
    EXPECT_EQ(f.diag, 0.75);
    EXPECT_EQ(f.offdiag, -0.25);
    const auto inv = qfi_inverse(2, 1, 1.0);
    EXPECT_EQ(inv.diag, 1.5);
    EXPECT_EQ(inv.offdiag, 0.5);
}

TEST(Qfi, RejectsDegenerateInputs) {
    EXPECT_THROW(qfi_matrix(1, 1, 1.0), std::invalid_argument);
    EXPECT_THROW(qfi_matrix(4, 0, 1.0), std::invalid_argument);
    EXPECT_THROW(qfi_inverse(4, 1, 0.0), std::invalid_argument);
}

TEST(Qfi, DenseCopyLayout) {
    const auto d = qfi_matrix(3, 2, 0.5).dense();
    ASSERT_EQ(d.size(), 9u);
    EXPECT_EQ(d[0], d[4]);
    EXPECT_EQ(d[1], d[3]);
    EXPECT_NE(d[0], d[1]);
}

TEST(Qfi, ClosedFormInverseMatchesEigen) {
    for (unsigned k : {1u, 2u, 3u}) {
        for (double dt : {0.1, 1.0, 2.5}) {
            const auto f = to_eigen(qfi_matrix(4, k, dt));
            const auto inv = to_eigen(qfi_inverse(4, k, dt));
            const Eigen::MatrixXd numeric = f.inverse();
            EXPECT_LT((numeric - inv).cwiseAbs().maxCoeff() / inv.cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Qfi, ProductIsIdentityUpTo256) {
    for (std::size_t L : {2u, 3u, 16u, 100u, 256u}) {
        const auto f = to_eigen(qfi_matrix(L, 2, 0.3));
        const auto inv = to_eigen(qfi_inverse(L, 2, 0.3));
        const Eigen::MatrixXd p = f * inv;
        EXPECT_LT((p - Eigen::MatrixXd::Identity(p.rows(), p.cols())).cwiseAbs().maxCoeff(), 1e-10) << L;
    }
}

TEST(Security, MarginFormula) {
    const auto m = security_margin(3, 1, 1);
    EXPECT_DOUBLE_EQ(m.phase_bound, std::sqrt(2.0));
    EXPECT_FALSE(m.secure);
    EXPECT_THROW(security_margin(10, 1, 0), std::invalid_argument);
}

TEST(Security, MaxSecureNAtMillionSites) {
    const auto n = max_secure_N(1'000'000, 1);
    EXPECT_EQ(n, 50'660u);
    EXPECT_EQ(n, static_cast<std::uint64_t>(std::floor(1'000'001.0 / (2 * std::numbers::pi * std::numbers::pi))));
    EXPECT_TRUE(security_margin(1'000'000, 1, n).secure);
    EXPECT_FALSE(security_margin(1'000'000, 1, n + 1).secure);
}

TEST(Security, MaxSecureNIsTightAcrossSizes) {
    for (std::size_t L : {20u, 100u, 1'000u, 12'345u, 1'000'000u, 100'000'000u}) {
        for (unsigned k : {1u, 2u, 3u}) {
            const auto n = max_secure_N(L, k);
            if (n > 0) EXPECT_TRUE(security_margin(L, k, n).secure);
            EXPECT_FALSE(security_margin(L, k, n + 1).secure);
        }
    }
    EXPECT_EQ(max_secure_N(10, 1), 0u);
}

TEST(Security, ReportJson) {
    const auto r = qfi_report(1'000'000, 1, 0.1, 50'660);
    EXPECT_TRUE(r.secure);
    EXPECT_DOUBLE_EQ(r.freq_bound, r.phase_bound / 0.1);
    const auto j = to_json(r);
    EXPECT_EQ(j.at("secure"), true);
    EXPECT_EQ(j.at("L"), 1'000'000);
}
