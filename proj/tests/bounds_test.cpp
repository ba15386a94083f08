#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdb/bounds.hpp"

namespace mdb {
namespace {

// Two-arm instance with p(0,1) = 1/2 + gap.
GapTable two_arm(double gap) {
    return GapTable(PreferenceMatrix(2, {0.5, 0.5 + gap, 0.5 - gap, 0.5}, 0));
}

TEST(ComplexityH, WorkedValues) {
    EXPECT_NEAR(complexity_H(two_arm(0.05)), 400.0, 1e-9);
    const GapTable g3(build_preference_matrix(synthetic_utilities(3), LinkKind::Linear));
    EXPECT_NEAR(complexity_H(g3), 411.1111111111111, 1e-9);
}

TEST(ComplexityH, DoublingGapsQuartersH) {
    const auto mu = synthetic_utilities(6);
    std::vector<double> half(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) half[i] = mu[i] / 2.0;
    // Linear gaps scale with utility differences.
    const GapTable g(build_preference_matrix(mu, LinkKind::Linear));
    const GapTable h(build_preference_matrix(UtilityVector(half), LinkKind::Linear));
    EXPECT_NEAR(complexity_H(h), 4.0 * complexity_H(g), 1e-9 * complexity_H(h));
}

TEST(ComplexityH, ZeroGapIsDegenerate) {
    const PreferenceMatrix P(2, {0.5, 0.5, 0.5, 0.5}, 0, false);
    EXPECT_THROW(complexity_H(GapTable(P)), DegenerateInstance);
}

TEST(InstanceComplexity, PairCount) {
    const GapTable g(build_preference_matrix(synthetic_utilities(5), LinkKind::Logit));
    for (std::size_t m = 2; m <= 5; ++m) EXPECT_EQ(instance_complexity(g, 1.5, m).C_m2, m * (m - 1) / 2);
    const auto c = instance_complexity(g, 1.5, 3);
    EXPECT_EQ(c.delta_vector.size(), 4u);
    EXPECT_EQ(c.delta_pairs.size(), 6u);
    EXPECT_GT(c.D, 0.0);
    EXPECT_GT(c.H, 0.0);
}

TEST(MultiRucbBound, WorkedValue) {
    const auto g = two_arm(0.5);
    const double T = std::exp(1.0);
    EXPECT_NEAR(instance_complexity(g, 2.0, 2).D, 32.0, 1e-12);
    EXPECT_NEAR(multirucb_bound(g, 2.0, 2, T), 19.979057207896393, 1e-9);
    EXPECT_NEAR(multirucb_bound(g, 2.0, 2, T) - 16.0, 3.9790572078963917, 1e-9);
}

TEST(MultiRucbBound, Preconditions) {
    const auto g = two_arm(0.5);
    EXPECT_THROW(multirucb_bound(g, 1.0, 2, 100.0), ArgumentError);
    EXPECT_THROW(multirucb_bound(g, 2.0, 2, 1.5), ArgumentError);
    EXPECT_THROW(multirucb_bound(g, 2.0, 3, 100.0), ArgumentError);
}

TEST(MultiRucbBound, MonotoneInMAndT) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t K = 3 + gen() % 8;
        std::vector<double> mu(K);
        mu[0] = 0.9;
        for (std::size_t i = 1; i < K; ++i) mu[i] = 0.85 * unit(gen);
        const GapTable g(build_preference_matrix(UtilityVector(mu), LinkKind::Logit));
        const double alpha = 1.01 + 2.0 * unit(gen);
        const double T = 10.0 + 1e6 * unit(gen);
        double prev = multirucb_bound(g, alpha, 2, T);
        for (std::size_t m = 3; m <= K; ++m) {
            const double cur = multirucb_bound(g, alpha, m, T);
            ASSERT_LE(cur, prev * (1.0 + 1e-12)) << "K=" << K << " m=" << m;
            prev = cur;
        }
        ASSERT_GT(multirucb_bound(g, alpha, 2, 10.0 * T), multirucb_bound(g, alpha, 2, T));
    }
}

TEST(MultiSbmFeedbackBound, WorkedValue) {
    const auto g = two_arm(0.1);
    EXPECT_NEAR(multisbm_feedback_leading_bound(g, 3.0, std::exp(1.0)), 50.36666666666667, 1e-9);
    EXPECT_THROW(multisbm_feedback_leading_bound(g, 2.9, 100.0), ArgumentError);
    EXPECT_THROW(multisbm_feedback_leading_bound(g, 3.0, 1.0), ArgumentError);
}

TEST(MultiSbmFeedbackBound, EqualGapsUseQuadraticBranch) {
    // Three arms with equal gaps 0.2: quadratic branch 2 * 5 * 0.2 / 0.04 = 50 per ln T.
    const PreferenceMatrix P(3, {0.5, 0.7, 0.7, 0.3, 0.5, 0.5, 0.3, 0.5, 0.5}, 0);
    const GapTable g(P);
    const double T = std::exp(2.0);
    EXPECT_NEAR(multisbm_feedback_leading_bound(g, 3.0, T), 50.0 * 2.0 + 11.0 * 0.2 / 6.0 * 3.0, 1e-9);
}

TEST(ConfidenceHorizon, WorkedValueAndMonotonicity) {
    EXPECT_NEAR(confidence_horizon_C(1.0, 1.5, 2), 3.1622776601683795, 1e-12);
    EXPECT_GT(confidence_horizon_C(0.01, 1.5, 2), confidence_horizon_C(0.1, 1.5, 2));
    EXPECT_NEAR(confidence_horizon_C(0.1, 1e6, 10), 1.0, 1e-4);
    EXPECT_THROW(confidence_horizon_C(0.0, 1.5, 2), ArgumentError);
    EXPECT_THROW(confidence_horizon_C(0.1, 0.5, 2), ArgumentError);
}

TEST(THatBound, WorkedValues) {
    EXPECT_NEAR(t_hat_bound(10.0, 10.0), 79.91464547107981, 1e-9);
    EXPECT_NEAR(t_hat_bound(0.0, 2.5), 8.047189562170502, 1e-9);
    EXPECT_NEAR(t_hat_bound(20.0, 10.0) - t_hat_bound(10.0, 10.0), 20.0, 1e-12);
    EXPECT_THROW(t_hat_bound(1.0, 2.0), ArgumentError);
}

}  // namespace
}  // namespace mdb
