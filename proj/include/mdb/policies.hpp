#pragma once

// Dueling / multi-dueling policies behind one select/observe contract.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdb/baim_lucb.hpp"
#include "mdb/core_model.hpp"
#include "mdb/environment.hpp"
#include "mdb/errors.hpp"
#include "mdb/rng.hpp"
#include "mdb/sbm_ucb.hpp"

namespace mdb {

class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string_view name() const = 0;

    /// Chooses the comparison set for global step t (1-based). Any policy
    /// randomness is drawn from `rng`, the run's shared stream.
    virtual ComparisonSet select(std::uint64_t t, Rng& rng) = 0;

    /// Receives the outcomes of the set returned by the preceding select().
    virtual void observe(std::span<const DuelOutcome> outcomes) = 0;
};

/// T_i = floor(a^(b^i)); epoch lengths tau_0 = T_0, tau_i = T_i - T_{i-1}.
class EpochSchedule {
public:
    EpochSchedule(double a, double b) : a_(a), b_(b) {
        if (!(a > 1.0) || !(b > 1.0)) throw ArgumentError("EpochSchedule: need a > 1 and b > 1");
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    /// T_i, saturated far above any simulated horizon.
    std::uint64_t end(std::size_t i) const {
        constexpr double cap = 4.0e18;
        const double v = std::pow(a_, std::pow(b_, static_cast<double>(i)));
        if (!(v < cap)) return static_cast<std::uint64_t>(cap);
        return static_cast<std::uint64_t>(std::floor(v));
    }

    std::uint64_t length(std::size_t i) const {
        return i == 0 ? end(0) : end(i) - end(i - 1);
    }

    /// BAIM confidence used in epoch i: 1 / tau_{i+1}.
    double confidence(std::size_t i) const {
        return 1.0 / static_cast<double>(length(i + 1));
    }

    /// Throws ConfigError unless T_i strictly increases (so tau_i >= 1) over
    /// every epoch that starts before `horizon`, plus the following one.
    void validate_until(std::uint64_t horizon) const {
        std::uint64_t prev = end(0);
        if (prev < 1) throw ConfigError("epoch schedule: T_0 must be at least 1");
        for (std::size_t i = 1;; ++i) {
            const std::uint64_t cur = end(i);
            if (cur <= prev) {
                throw ConfigError("epoch schedule: T_" + std::to_string(i) +
                                  " does not exceed T_" + std::to_string(i - 1));
            }
            if (prev >= horizon) break;
            prev = cur;
        }
    }

private:
    double a_;
    double b_;
};

/// Epoch-based explore-then-exploit two-dueling policy.
///
/// Each epoch fixes a left arm (last epoch's identified best, or a uniform
/// random arm) and runs a fresh BAIM on the right arm, with reward 1 when the
/// right arm beats the left one. Once the BAIM stops, the rest of the epoch
/// plays its answer.
template <BestArmIdentifier Baim = LucbMachine>
class DoublerBai final : public Policy {
public:
    DoublerBai(std::size_t K, EpochSchedule schedule, Baim baim,
               std::optional<double> fixed_confidence = std::nullopt)
        : K_(K), schedule_(schedule), baim_(std::move(baim)), fixed_confidence_(fixed_confidence) {}

    std::string_view name() const override { return "doubler_bai"; }

    ComparisonSet select(std::uint64_t, Rng& rng) override {
        if (awaiting_) throw ContractViolation("DoublerBai::select before observe");
        if (step_ == 0) begin_epoch(rng);
        if (identified_) {
            right_ = *identified_;
            exploring_ = false;
        } else {
            right_ = baim_.advance();
            exploring_ = true;
        }
        awaiting_ = true;
        return ComparisonSet::pair(left_, right_);
    }

    void observe(std::span<const DuelOutcome> outcomes) override {
        if (!awaiting_ || outcomes.size() != 1) {
            throw ContractViolation("DoublerBai::observe expects the single outcome of its pair");
        }
        awaiting_ = false;
        if (exploring_) {
            const bool right_won = !outcomes[0].i_won;
            baim_.feedback(right_won);
            if (baim_.stop_test()) {
                identified_ = baim_.return_best();
                explore_length_ = step_ + 1;
            }
        }
        if (++step_ == schedule_.length(epoch_)) {
            previous_identified_ = identified_;
            ++epoch_;
            step_ = 0;
        }
    }

    std::size_t epoch() const noexcept { return epoch_; }
    std::uint64_t step_in_epoch() const noexcept { return step_; }
    ArmId left_arm() const noexcept { return left_; }
    bool exploring() const noexcept { return exploring_; }
    const std::optional<ArmId>& identified() const noexcept { return identified_; }
    const std::optional<std::uint64_t>& explore_length() const noexcept { return explore_length_; }
    const Baim& baim() const noexcept { return baim_; }
    const EpochSchedule& schedule() const noexcept { return schedule_; }

private:
    void begin_epoch(Rng& rng) {
        left_ = previous_identified_ ? *previous_identified_ : static_cast<ArmId>(rng.below(K_));
        baim_.reset(fixed_confidence_ ? *fixed_confidence_ : schedule_.confidence(epoch_));
        identified_.reset();
        explore_length_.reset();
    }

    std::size_t K_;
    EpochSchedule schedule_;
    Baim baim_;
    std::optional<double> fixed_confidence_;
    std::size_t epoch_ = 0;
    std::uint64_t step_ = 0;
    ArmId left_ = 0;
    ArmId right_ = 0;
    bool exploring_ = false;
    bool awaiting_ = false;
    std::optional<ArmId> identified_;
    std::optional<ArmId> previous_identified_;
    std::optional<std::uint64_t> explore_length_;
};

/// K singleton bandit machines; the machine indexed by the left arm picks the
/// right arm, and the right arm becomes the next left arm. With additional
/// feedback on, the loser's view of each duel is sent to the right arm's machine.
class MultiSbmFeedback final : public Policy {
public:
    MultiSbmFeedback(std::size_t K, double alpha, bool additional_feedback = true,
                     ArmId initial_arm = 0)
        : feedback_enabled_(additional_feedback), previous_right_(initial_arm) {
        if (initial_arm >= K) throw ArgumentError("MultiSbmFeedback: initial arm out of range");
        machines_.reserve(K);
        for (std::size_t k = 0; k < K; ++k) machines_.emplace_back(K, alpha);
    }

    std::string_view name() const override {
        return feedback_enabled_ ? "multisbm_feedback" : "multisbm";
    }

    ComparisonSet select(std::uint64_t, Rng&) override {
        if (awaiting_) throw ContractViolation("MultiSbmFeedback::select before observe");
        left_ = previous_right_;
        right_ = machines_[left_].advance();
        awaiting_ = true;
        return ComparisonSet::pair(left_, right_);
    }

    void observe(std::span<const DuelOutcome> outcomes) override {
        if (!awaiting_ || outcomes.size() != 1) {
            throw ContractViolation("MultiSbmFeedback::observe expects the single outcome of its pair");
        }
        awaiting_ = false;
        const bool right_won = !outcomes[0].i_won;
        machines_[left_].feedback(right_won);
        if (feedback_enabled_ && left_ != right_) {
            machines_[right_].additional_feedback(left_, !right_won);
        }
        previous_right_ = right_;
    }

    bool additional_feedback_enabled() const noexcept { return feedback_enabled_; }
    const SbmMachine& machine(ArmId x) const { return machines_[x]; }
    ArmId left_arm() const noexcept { return left_; }
    ArmId right_arm() const noexcept { return right_; }

private:
    std::vector<SbmMachine> machines_;
    bool feedback_enabled_;
    ArmId previous_right_;
    ArmId left_ = 0;
    ArmId right_ = 0;
    bool awaiting_ = false;
};

/// Relative-UCB style multi-dueling policy over comparison sets of size <= m.
class MultiRucb final : public Policy {
public:
    enum class Case { NoCandidates, Single, AllFit, Overflow };

    MultiRucb(std::size_t K, std::size_t m, double alpha = 1.01)
        : K_(K), m_(m), alpha_(alpha), wins_(K * K, 0) {
        if (m_ < 2 || m_ > K_) throw ConfigError("MultiRucb: need 2 <= m <= K");
        if (!(alpha_ > 0.5)) throw ConfigError("MultiRucb: alpha must exceed 1/2");
    }

    std::string_view name() const override { return "multirucb"; }

    /// Optimistic estimate u_ij from the win counts, with x/0 := 1 in both fractions.
    static double upper_bound(std::uint64_t wins_ij, std::uint64_t wins_ji, double alpha,
                              double log_t) {
        const std::uint64_t n = wins_ij + wins_ji;
        if (n == 0) return 1.0 + std::sqrt(alpha * log_t);
        const double nd = static_cast<double>(n);
        return static_cast<double>(wins_ij) / nd + std::sqrt(alpha * log_t / nd);
    }

    /// Arms whose optimistic estimate is >= 1/2 against every opponent.
    std::vector<ArmId> candidates(std::uint64_t t) const {
        const double log_t = std::log(static_cast<double>(t));
        std::vector<ArmId> out;
        for (ArmId c = 0; c < K_; ++c) {
            bool keep = true;
            for (ArmId j = 0; j < K_ && keep; ++j) {
                if (j == c) continue;
                const std::uint64_t w_cj = wins(c, j);
                const std::uint64_t n = w_cj + wins(j, c);
                // The ratio alone clears 1/2: the radical can only add to it.
                if (n == 0 || 2 * w_cj >= n) continue;
                keep = upper_bound(w_cj, wins(j, c), alpha_, log_t) >= 0.5;
            }
            if (keep) out.push_back(c);
        }
        return out;
    }

    ComparisonSet select(std::uint64_t t, Rng& rng) override {
        if (t < 1) throw ContractViolation("MultiRucb::select: t starts at 1");
        const std::vector<ArmId> C = candidates(t);

        if (C.empty()) {
            last_case_ = Case::NoCandidates;
            return record(ComparisonSet::of(rng.sample<ArmId>(all_arms(), m_)));
        }

        if (hypothesis_ && !std::binary_search(C.begin(), C.end(), *hypothesis_)) {
            hypothesis_.reset();
        }

        if (C.size() == 1) {
            last_case_ = Case::Single;
            hypothesis_ = C.front();
            return record(ComparisonSet::of(C));
        }
        if (C.size() <= m_) {
            last_case_ = Case::AllFit;
            return record(ComparisonSet::of(C));
        }

        last_case_ = Case::Overflow;
        if (!hypothesis_) return record(ComparisonSet::of(rng.sample<ArmId>(C, m_)));

        std::vector<ArmId> rest;
        rest.reserve(C.size() - 1);
        for (ArmId c : C) {
            if (c != *hypothesis_) rest.push_back(c);
        }
        if (rng.bernoulli(0.5)) {
            std::vector<ArmId> A = rng.sample<ArmId>(rest, m_ - 1);
            A.push_back(*hypothesis_);
            return record(ComparisonSet::of(std::move(A)));
        }
        return record(ComparisonSet::of(rng.sample<ArmId>(rest, m_)));
    }

    void observe(std::span<const DuelOutcome> outcomes) override {
        for (const auto& o : outcomes) {
            if (o.self_duel()) continue;
            ++wins_[o.winner() * K_ + o.loser()];
        }
    }

    std::uint64_t wins(ArmId i, ArmId j) const { return wins_[i * K_ + j]; }
    void set_wins(ArmId i, ArmId j, std::uint64_t w) { wins_[i * K_ + j] = w; }
    std::uint64_t total_observations() const {
        return std::accumulate(wins_.begin(), wins_.end(), std::uint64_t{0});
    }
    const std::optional<ArmId>& hypothesis() const noexcept { return hypothesis_; }
    Case last_case() const noexcept { return last_case_; }
    std::uint64_t case_count(Case c) const { return case_counts_[static_cast<std::size_t>(c)]; }
    std::size_t num_arms() const noexcept { return K_; }
    std::size_t max_set_size() const noexcept { return m_; }
    double alpha() const noexcept { return alpha_; }

private:
    std::vector<ArmId> all_arms() const {
        std::vector<ArmId> arms(K_);
        std::iota(arms.begin(), arms.end(), ArmId{0});
        return arms;
    }

    ComparisonSet record(ComparisonSet A) {
        ++case_counts_[static_cast<std::size_t>(last_case_)];
        return A;
    }

    std::size_t K_;
    std::size_t m_;
    double alpha_;
    std::vector<std::uint64_t> wins_;
    std::optional<ArmId> hypothesis_;
    Case last_case_ = Case::NoCandidates;
    std::uint64_t case_counts_[4] = {0, 0, 0, 0};
};

/// Control baseline: m distinct arms uniformly at random every step.
class UniformRandom final : public Policy {
public:
    UniformRandom(std::size_t K, std::size_t m) : m_(m), arms_(K) {
        if (m_ < 2 || m_ > K) throw ConfigError("UniformRandom: need 2 <= m <= K");
        std::iota(arms_.begin(), arms_.end(), ArmId{0});
    }

    std::string_view name() const override { return "uniform_random"; }

    ComparisonSet select(std::uint64_t, Rng& rng) override {
        return ComparisonSet::of(rng.sample<ArmId>(arms_, m_));
    }

    void observe(std::span<const DuelOutcome>) override {}

private:
    std::size_t m_;
    std::vector<ArmId> arms_;
};

}  // namespace mdb
