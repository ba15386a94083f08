#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "mdb/policies.hpp"

namespace mdb {
namespace {

PreferenceMatrix synthetic(std::size_t K, LinkKind link = LinkKind::Linear) {
    return build_preference_matrix(synthetic_utilities(K), link);
}

// Records what the policy reports to the BAIM; always names arm 0 after `stop_after` samples.
struct RecordingBaim {
    std::size_t K = 2;
    std::size_t stop_after = 1000000;
    std::vector<std::pair<ArmId, bool>> log;
    std::vector<double> resets;
    ArmId next = 0;
    ArmId last = 0;
    std::size_t seen = 0;

    void reset(double delta) {
        resets.push_back(delta);
        seen = 0;
    }
    ArmId advance() {
        last = next;
        next = (next + 1) % K;
        return last;
    }
    void feedback(bool b) {
        log.emplace_back(last, b);
        ++seen;
    }
    bool stop_test() { return seen >= stop_after; }
    ArmId return_best() const { return 0; }
};
static_assert(BestArmIdentifier<RecordingBaim>);

RecordingBaim make_baim(std::size_t K, std::size_t stop_after = 1000000) {
    RecordingBaim b;
    b.K = K;
    b.stop_after = stop_after;
    return b;
}

TEST(EpochSchedule, WorkedValues) {
    const EpochSchedule s(10.0, 1.1);
    EXPECT_EQ(s.end(0), 10u);
    EXPECT_EQ(s.end(1), 12u);
    EXPECT_EQ(s.length(0), 10u);
    EXPECT_EQ(s.length(1), 2u);
    EXPECT_EQ(s.confidence(0), 0.5);
    EXPECT_NO_THROW(s.validate_until(10000000));
    for (std::size_t i = 1; s.end(i - 1) < 10000000; ++i) ASSERT_GT(s.end(i), s.end(i - 1));
}

TEST(EpochSchedule, RejectsStallingSchedules) {
    EXPECT_THROW(EpochSchedule(1.0, 2.0), ArgumentError);
    EXPECT_THROW(EpochSchedule(2.0, 1.0), ArgumentError);
    // 2^(1.01^i) floors to 2 for several epochs.
    EXPECT_THROW(EpochSchedule(2.0, 1.01).validate_until(1000), ConfigError);
}

TEST(DoublerBai, RightArmRewardIsRightBeatsLeft) {
    // p(0,1) = 1: arm 0 always wins.
    const PreferenceMatrix P(2, {0.5, 1.0, 0.0, 0.5}, 0);
    DoublerBai<RecordingBaim> policy(2, EpochSchedule(10.0, 1.1), make_baim(2));
    Environment env(P, 2, 3);
    for (std::uint64_t t = 1; t <= 10; ++t) {
        const auto A = policy.select(t, env.rng());
        policy.observe(env.step(A));
    }
    const ArmId left = policy.left_arm();
    for (const auto& [arm, reward] : policy.baim().log) {
        if (arm == left) continue;  // self-duel coin
        EXPECT_EQ(reward, arm == 0) << "left " << left << " right " << arm;
    }
}

TEST(DoublerBai, EpochsResetBaimWithScheduledConfidence) {
    const auto P = synthetic(4);
    const EpochSchedule s(10.0, 1.1);
    DoublerBai<RecordingBaim> policy(4, s, make_baim(4));
    Environment env(P, 2, 1);
    for (std::uint64_t t = 1; t <= s.end(3); ++t) {
        const auto A = policy.select(t, env.rng());
        policy.observe(env.step(A));
    }
    ASSERT_EQ(policy.baim().resets.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(policy.baim().resets[i], s.confidence(i));
    EXPECT_EQ(policy.epoch(), 4u);
}

TEST(DoublerBai, IdentifiedArmIsPlayedAndCarriedForward) {
    const auto P = synthetic(4);
    DoublerBai<RecordingBaim> policy(4, EpochSchedule(10.0, 1.1), make_baim(4, 3));
    Environment env(P, 2, 1);
    for (std::uint64_t t = 1; t <= 10; ++t) {
        const auto A = policy.select(t, env.rng());
        if (t > 3) {
            EXPECT_FALSE(policy.exploring());
            EXPECT_EQ(A.declared_pair()->right, 0u);
        }
        policy.observe(env.step(A));
    }
    ASSERT_EQ(policy.explore_length(), 3u);
    const auto A = policy.select(11, env.rng());
    EXPECT_EQ(A.declared_pair()->left, 0u);
    EXPECT_EQ(policy.left_arm(), 0u);
}

TEST(DoublerBai, ExploresWholeEpochWhenBaimNeverStops) {
    const auto P = synthetic(4);
    DoublerBai<RecordingBaim> policy(4, EpochSchedule(10.0, 1.1), make_baim(4));
    Environment env(P, 2, 1);
    for (std::uint64_t t = 1; t <= 10; ++t) {
        policy.observe(env.step(policy.select(t, env.rng())));
        EXPECT_TRUE(policy.exploring());
    }
    EXPECT_EQ(policy.baim().log.size(), 10u);
    EXPECT_FALSE(policy.identified());
}

TEST(DoublerBai, LucbRunConvergesToBestArm) {
    const auto P = build_preference_matrix(UtilityVector({0.9, 0.3, 0.2, 0.1}), LinkKind::Linear);
    DoublerBai<LucbMachine> policy(4, EpochSchedule(10.0, 1.1), LucbMachine(4), 0.05);
    Environment env(P, 2, 12);
    for (std::uint64_t t = 1; t <= 20000; ++t) policy.observe(env.step(policy.select(t, env.rng())));
    ASSERT_TRUE(policy.identified());
    EXPECT_EQ(*policy.identified(), 0u);
}

TEST(MultiSbmFeedback, FirstLeftArmIsZero) {
    const auto P = synthetic(5);
    MultiSbmFeedback policy(5, 3.0);
    Environment env(P, 2, 1);
    const auto A = policy.select(1, env.rng());
    EXPECT_EQ(A.declared_pair()->left, 0u);
    EXPECT_EQ(A.declared_pair()->right, 0u);  // fresh machine picks arm 0
    policy.observe(env.step(A));
    const auto B = policy.select(2, env.rng());
    EXPECT_EQ(B.declared_pair()->left, 0u);
    EXPECT_EQ(B.declared_pair()->right, 1u);
}

TEST(MultiSbmFeedback, NoAdditionalFeedbackWhenFlagOff) {
    const auto P = synthetic(6, LinkKind::Natural);
    MultiSbmFeedback policy(6, 3.0, false);
    EXPECT_EQ(policy.name(), "multisbm");
    Environment env(P, 2, 4);
    for (std::uint64_t t = 1; t <= 5000; ++t) policy.observe(env.step(policy.select(t, env.rng())));
    for (ArmId x = 0; x < 6; ++x) {
        for (ArmId k = 0; k < 6; ++k) ASSERT_EQ(policy.machine(x).additional(k), 0u);
    }
}

TEST(MultiSbmFeedback, SelfDuelSendsNoAdditionalFeedback) {
    const auto P = synthetic(3);
    MultiSbmFeedback policy(3, 3.0);
    Environment env(P, 2, 1);
    policy.observe(env.step(policy.select(1, env.rng())));  // (0, 0)
    EXPECT_FALSE(policy.machine(0).pending());
}

// Best machine: suboptimal pulls minus delivered suboptimal additional samples
// equals [start at best] - [currently at best].
TEST(MultiSbmFeedback, ConservationInBestArmMachine) {
    for (auto link : {LinkKind::Linear, LinkKind::Natural, LinkKind::Logit}) {
        const auto P = synthetic(6, link);
        MultiSbmFeedback policy(6, 3.0);
        Environment env(P, 2, 17);
        for (std::uint64_t t = 1; t <= 20000; ++t) {
            policy.observe(env.step(policy.select(t, env.rng())));
            const auto& S = policy.machine(0);
            std::int64_t rho = 0;
            std::int64_t s = 0;
            for (ArmId i = 1; i < 6; ++i) {
                rho += static_cast<std::int64_t>(S.pulls(i));
                s += static_cast<std::int64_t>(S.additional(i));
            }
            if (S.pending() && S.pending()->arm != 0) ++s;
            const std::int64_t at_best = policy.right_arm() == 0 ? 1 : 0;
            ASSERT_EQ(rho - s, 1 - at_best) << "t=" << t;
        }
    }
}

// Measured at the best machine's own internal times the two totals agree exactly.
TEST(MultiSbmFeedback, ConservationAtBestMachineInternalTimes) {
    const auto P = synthetic(6, LinkKind::Logit);
    MultiSbmFeedback policy(6, 3.0);
    Environment env(P, 2, 23);
    int checks = 0;
    for (std::uint64_t t = 1; t <= 20000; ++t) {
        const auto A = policy.select(t, env.rng());
        if (policy.left_arm() == 0) {
            const auto& S = policy.machine(0);
            std::uint64_t rho = 0, s = 0;
            for (ArmId i = 1; i < 6; ++i) {
                rho += S.pulls(i);
                s += S.additional(i);
            }
            ASSERT_EQ(rho, s) << "t=" << t;
            ++checks;
        }
        policy.observe(env.step(A));
    }
    EXPECT_GT(checks, 1000);
}

TEST(MultiRucb, UpperBoundWorkedValue) {
    const double log_t = std::log(10.0);
    EXPECT_NEAR(MultiRucb::upper_bound(3, 1, 1.0, log_t), 1.5087135646925733, 1e-12);
    EXPECT_NEAR(MultiRucb::upper_bound(1, 3, 1.0, log_t), 1.0087135646925733, 1e-12);
    EXPECT_EQ(MultiRucb::upper_bound(0, 0, 1.01, 0.0), 1.0);
}

TEST(MultiRucb, FirstStepSelectsMUniformArms) {
    MultiRucb policy(8, 3);
    Rng rng(1);
    EXPECT_EQ(policy.candidates(1).size(), 8u);
    const auto A = policy.select(1, rng);
    EXPECT_EQ(A.size(), 3u);
    EXPECT_EQ(policy.last_case(), MultiRucb::Case::Overflow);
}

TEST(MultiRucb, TwoArmExampleKeepsBoth) {
    MultiRucb policy(2, 2, 1.0);
    policy.set_wins(0, 1, 3);
    policy.set_wins(1, 0, 1);
    EXPECT_EQ(policy.candidates(10), (std::vector<ArmId>{0, 1}));
}

// Oracle: literal definition, no shortcuts.
std::vector<ArmId> brute_candidates(const MultiRucb& p, std::uint64_t t) {
    const std::size_t K = p.num_arms();
    const double log_t = std::log(static_cast<double>(t));
    std::vector<ArmId> out;
    for (ArmId c = 0; c < K; ++c) {
        bool ok = true;
        for (ArmId j = 0; j < K; ++j) {
            if (j == c) continue;
            const double w = static_cast<double>(p.wins(c, j));
            const double n = w + static_cast<double>(p.wins(j, c));
            const double ratio = n == 0.0 ? 1.0 : w / n;
            const double radicand = n == 0.0 ? p.alpha() * log_t : p.alpha() * log_t / n;
            if (ratio + std::sqrt(radicand) < 0.5) ok = false;
        }
        if (ok) out.push_back(c);
    }
    return out;
}

TEST(MultiRucb, CandidatesMatchBruteForce) {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<std::size_t> K_dist(2, 9);
    std::uniform_int_distribution<std::uint64_t> w_dist(0, 60);
    std::uniform_int_distribution<std::uint64_t> t_dist(1, 100000);
    std::bernoulli_distribution zero(0.2);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t K = K_dist(gen);
        MultiRucb p(K, 2, rep % 2 ? 1.01 : 0.6);
        for (ArmId i = 0; i < K; ++i) {
            for (ArmId j = 0; j < K; ++j) {
                if (i != j) p.set_wins(i, j, zero(gen) ? 0 : w_dist(gen));
            }
        }
        const auto t = t_dist(gen);
        ASSERT_EQ(p.candidates(t), brute_candidates(p, t)) << "rep " << rep;
    }
}

TEST(MultiRucb, SingleCandidateLatchesHypothesis) {
    MultiRucb p(3, 2);
    // Arm 2 crushes both others; arms 0 and 1 lose heavily to it.
    p.set_wins(2, 0, 1000);
    p.set_wins(2, 1, 1000);
    p.set_wins(0, 1, 500);
    p.set_wins(1, 0, 500);
    Rng rng(1);
    const auto A = p.select(100, rng);
    EXPECT_EQ(p.last_case(), MultiRucb::Case::Single);
    EXPECT_EQ(A.arms(), std::vector<ArmId>{2});
    ASSERT_TRUE(p.hypothesis());
    EXPECT_EQ(*p.hypothesis(), 2u);
}

TEST(MultiRucb, ObserveBookkeeping) {
    MultiRucb p(3, 3);
    const std::vector<DuelOutcome> out{{0, 1, true}, {1, 2, true}, {0, 2, true}};
    p.observe(out);
    EXPECT_EQ(p.wins(0, 1), 1u);
    EXPECT_EQ(p.wins(1, 2), 1u);
    EXPECT_EQ(p.wins(0, 2), 1u);
    EXPECT_EQ(p.total_observations(), 3u);
    p.observe({});
    const std::vector<DuelOutcome> self{{1, 1, true}};
    p.observe(self);
    EXPECT_EQ(p.total_observations(), 3u);
    const std::vector<DuelOutcome> lost{{0, 2, false}};
    p.observe(lost);
    EXPECT_EQ(p.wins(2, 0), 1u);
}

TEST(MultiRucb, RunInvariants) {
    const auto P = synthetic(8, LinkKind::Logit);
    for (std::size_t m : {2u, 4u, 8u}) {
        MultiRucb p(8, m);
        Environment env(P, m, 5);
        std::uint64_t duels = 0;
        for (std::uint64_t t = 1; t <= 5000; ++t) {
            const auto A = p.select(t, env.rng());
            ASSERT_GE(A.size(), 1u);
            ASSERT_LE(A.size(), m);
            const auto out = env.step(A);
            duels += out.size();
            p.observe(out);
            ASSERT_EQ(p.total_observations(), duels);
        }
        if (m == 8) {
            EXPECT_EQ(p.case_count(MultiRucb::Case::Overflow), 0u);
        }
    }
}

TEST(MultiRucb, HypothesisUntouchedWhenNoCandidates) {
    MultiRucb p(3, 2, 0.6);
    p.set_wins(0, 1, 1000);
    p.set_wins(0, 2, 1000);
    p.set_wins(1, 2, 500);
    p.set_wins(2, 1, 500);
    Rng rng(2);
    p.select(2, rng);
    ASSERT_EQ(*p.hypothesis(), 0u);
    // A cycle where every arm loses heavily to another.
    p.set_wins(0, 1, 0);
    p.set_wins(1, 0, 1000);
    p.set_wins(0, 2, 1000);
    p.set_wins(2, 0, 0);
    p.set_wins(1, 2, 0);
    p.set_wins(2, 1, 1000);
    ASSERT_TRUE(p.candidates(2).empty());
    const auto A = p.select(2, rng);
    EXPECT_EQ(p.last_case(), MultiRucb::Case::NoCandidates);
    EXPECT_EQ(A.size(), 2u);
    ASSERT_TRUE(p.hypothesis());
    EXPECT_EQ(*p.hypothesis(), 0u);
}

TEST(MultiRucb, RejectsBadParameters) {
    EXPECT_THROW(MultiRucb(4, 1), ConfigError);
    EXPECT_THROW(MultiRucb(4, 5), ConfigError);
    EXPECT_THROW(MultiRucb(4, 2, 0.5), ConfigError);
}

TEST(UniformRandom, DistinctArmsOfSizeM) {
    UniformRandom p(6, 3);
    Rng rng(4);
    std::vector<int> hits(6, 0);
    for (int k = 0; k < 6000; ++k) {
        const auto A = p.select(1, rng);
        ASSERT_EQ(A.size(), 3u);
        for (ArmId a : A.arms()) ++hits[a];
    }
    for (int h : hits) EXPECT_NEAR(h, 3000, 3.0 * std::sqrt(6000 * 0.25));
    EXPECT_THROW(UniformRandom(3, 4), ConfigError);
}

TEST(UniformRandom, FullSetRegretIsMeanGap) {
    const auto P = synthetic(5);
    UniformRandom p(5, 5);
    Environment env(P, 5, 1);
    env.step(p.select(1, env.rng()));
    const GapTable g(P);
    double mean = 0.0;
    for (ArmId a = 0; a < 5; ++a) mean += g.of(a);
    EXPECT_NEAR(env.cumulative_regret(), mean / 5.0, 1e-12);
}

}  // namespace
}  // namespace mdb
