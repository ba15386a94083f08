#pragma once

// Best-arm identification machine backed by LUCB1.
//
// LUCB samples two arms per round; the machine hands them out one at a time
// through a pending queue so that every advance() yields a single arm.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "mdb/core_model.hpp"
#include "mdb/errors.hpp"

namespace mdb {

/// Reset / Advance / Feedback / StopTest / Return.
template <typename M>
concept BestArmIdentifier = requires(M m, const M cm, double delta, bool b) {
    { m.reset(delta) };
    { m.advance() } -> std::convertible_to<ArmId>;
    { m.feedback(b) };
    { m.stop_test() } -> std::convertible_to<bool>;
    { cm.return_best() } -> std::convertible_to<ArmId>;
};

class LucbMachine {
public:
    explicit LucbMachine(std::size_t K, double delta = 0.1) : K_(K) {
        if (K_ < 2) throw ArgumentError("LucbMachine: need at least 2 arms");
        reset(delta);
    }

    /// LUCB1 exploration rate sqrt(ln(5 K t^4 / (4 delta)) / (2 u)).
    static double beta(std::uint64_t pulls, std::uint64_t round, std::size_t K, double delta) {
        const double t = static_cast<double>(round);
        const double num = std::log(5.0 * static_cast<double>(K) * t * t * t * t / (4.0 * delta));
        return std::sqrt(num / (2.0 * static_cast<double>(pulls)));
    }

    /// delta = 1 is allowed: epoch schedules with unit-length epochs produce it.
    void reset(double delta) {
        if (!(delta > 0.0 && delta <= 1.0)) {
            throw ArgumentError("LucbMachine::reset: confidence must be in (0,1]");
        }
        delta_ = delta;
        pulls_.assign(K_, 0);
        sums_.assign(K_, 0.0);
        round_ = 1;
        pending_.clear();
        for (ArmId a = 0; a < K_; ++a) pending_.push_back(a);
        awaiting_.reset();
        stopped_ = false;
        best_.reset();
    }

    ArmId advance() {
        if (stopped_) throw ContractViolation("LucbMachine::advance on a stopped machine");
        if (awaiting_) throw ContractViolation("LucbMachine::advance before feedback");
        if (pending_.empty()) schedule_round();
        awaiting_ = pending_.front();
        pending_.pop_front();
        return *awaiting_;
    }

    void feedback(bool reward) {
        if (!awaiting_) throw ContractViolation("LucbMachine::feedback without advance");
        const ArmId a = *awaiting_;
        awaiting_.reset();
        ++pulls_[a];
        sums_[a] += reward ? 1.0 : 0.0;
        if (pending_.empty()) ++round_;
    }

    /// Latches once the leader's lower bound clears every other upper bound.
    bool stop_test() {
        if (stopped_) return true;
        for (auto n : pulls_) {
            if (n == 0) return false;
        }
        const ArmId h = leader();
        const double lower = mean(h) - beta(pulls_[h], round_, K_, delta_);
        for (ArmId j = 0; j < K_; ++j) {
            if (j == h) continue;
            if (!(lower > mean(j) + beta(pulls_[j], round_, K_, delta_))) return false;
        }
        stopped_ = true;
        best_ = h;
        return true;
    }

    ArmId return_best() const {
        if (!stopped_) throw ContractViolation("LucbMachine::return_best before stopping");
        return *best_;
    }

    std::size_t num_arms() const noexcept { return K_; }
    double confidence() const noexcept { return delta_; }
    bool stopped() const noexcept { return stopped_; }
    std::uint64_t round() const noexcept { return round_; }
    std::uint64_t pulls(ArmId a) const { return pulls_[a]; }
    std::uint64_t total_pulls() const {
        std::uint64_t n = 0;
        for (auto p : pulls_) n += p;
        return n;
    }
    double mean(ArmId a) const { return pulls_[a] ? sums_[a] / static_cast<double>(pulls_[a]) : 0.0; }
    const std::deque<ArmId>& pending() const noexcept { return pending_; }

private:
    ArmId leader() const {
        ArmId h = 0;
        for (ArmId a = 1; a < K_; ++a) {
            if (mean(a) > mean(h)) h = a;
        }
        return h;
    }

    void schedule_round() {
        const ArmId h = leader();
        std::optional<ArmId> l;
        double best_ucb = 0.0;
        for (ArmId a = 0; a < K_; ++a) {
            if (a == h) continue;
            const double ucb = mean(a) + beta(pulls_[a], round_, K_, delta_);
            if (!l || ucb > best_ucb) {
                l = a;
                best_ucb = ucb;
            }
        }
        pending_.push_back(h);
        pending_.push_back(*l);
    }

    std::size_t K_;
    double delta_ = 0.1;
    std::vector<std::uint64_t> pulls_;
    std::vector<double> sums_;
    std::uint64_t round_ = 1;
    std::deque<ArmId> pending_;
    std::optional<ArmId> awaiting_;
    bool stopped_ = false;
    std::optional<ArmId> best_;
};

static_assert(BestArmIdentifier<LucbMachine>);

}  // namespace mdb
