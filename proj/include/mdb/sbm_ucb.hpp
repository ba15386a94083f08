#pragma once

// Singleton bandit machine: UCB over K arms with an additional-feedback
// channel. Additional samples count toward an arm's mean and confidence
// width without counting as pulls.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mdb/core_model.hpp"
#include "mdb/errors.hpp"

namespace mdb {

/// max{3, ln K / ln ln T}. Needs T >= 16 so that ln ln T is comfortably positive.
inline double recommended_alpha(std::size_t K, std::uint64_t T) {
    if (K < 2) throw ArgumentError("recommended_alpha: K must be at least 2");
    if (T < 16) throw ArgumentError("recommended_alpha: horizon must be at least 16");
    const double ratio = std::log(static_cast<double>(K)) /
                         std::log(std::log(static_cast<double>(T)));
    return std::max(3.0, ratio);
}

class SbmMachine {
public:
    struct Sample {
        ArmId arm;
        bool value;
    };

    explicit SbmMachine(std::size_t K, double alpha = 3.0) : K_(K), alpha_(alpha) {
        if (K_ < 1) throw ArgumentError("SbmMachine: need at least 1 arm");
        if (!(alpha_ > 0.0)) throw ArgumentError("SbmMachine: alpha must be positive");
        reset();
    }

    /// Rebuilds a machine from saved statistics. Arms with rho + s == 0 keep
    /// the untried sentinel regardless of the supplied mean.
    static SbmMachine restore(double alpha, std::vector<double> means,
                              std::vector<std::uint64_t> rho, std::vector<std::uint64_t> s,
                              std::uint64_t internal_time) {
        const std::size_t K = means.size();
        if (rho.size() != K || s.size() != K || internal_time < 1) {
            throw ArgumentError("SbmMachine::restore: inconsistent snapshot");
        }
        SbmMachine m(K, alpha);
        for (ArmId i = 0; i < K; ++i) {
            if (rho[i] + s[i] > 0) m.mu_hat_[i] = means[i];
        }
        m.rho_ = std::move(rho);
        m.s_ = std::move(s);
        m.t_ = internal_time;
        return m;
    }

    void reset() {
        mu_hat_.assign(K_, std::numeric_limits<double>::infinity());
        rho_.assign(K_, 0);
        s_.assign(K_, 0);
        t_ = 1;
        pending_.reset();
        awaiting_.reset();
    }

    /// Queues a sample of `arm` observed without pulling it; consumed by the next advance().
    void additional_feedback(ArmId arm, bool value) {
        if (pending_) throw ContractViolation("SbmMachine: additional feedback slot occupied");
        if (arm >= K_) throw ContractViolation("SbmMachine: arm index out of range");
        pending_ = Sample{arm, value};
    }

    ArmId advance() {
        if (awaiting_) throw ContractViolation("SbmMachine::advance before feedback");
        if (pending_) {
            absorb(pending_->arm, pending_->value);
            ++s_[pending_->arm];
            pending_.reset();
        }
        const double log_t = std::log(static_cast<double>(t_));
        ArmId best = 0;
        double best_index = -std::numeric_limits<double>::infinity();
        for (ArmId i = 0; i < K_; ++i) {
            const double idx = index(i, log_t);
            if (idx > best_index) {
                best = i;
                best_index = idx;
            }
        }
        awaiting_ = best;
        return best;
    }

    void feedback(bool value) {
        if (!awaiting_) throw ContractViolation("SbmMachine::feedback without advance");
        const ArmId a = *awaiting_;
        awaiting_.reset();
        absorb(a, value);
        ++rho_[a];
        ++t_;
    }

    /// Upper confidence index of arm i; +inf for an untried arm.
    double index(ArmId i, double log_t) const {
        const std::uint64_t n = rho_[i] + s_[i];
        if (n == 0) return std::numeric_limits<double>::infinity();
        return mu_hat_[i] + std::sqrt((alpha_ + 2.0) * log_t / (2.0 * static_cast<double>(n)));
    }

    std::size_t num_arms() const noexcept { return K_; }
    double alpha() const noexcept { return alpha_; }
    double mean(ArmId i) const { return mu_hat_[i]; }
    std::uint64_t pulls(ArmId i) const { return rho_[i]; }
    std::uint64_t additional(ArmId i) const { return s_[i]; }
    std::uint64_t internal_time() const noexcept { return t_; }
    const std::optional<Sample>& pending() const noexcept { return pending_; }

private:
    void absorb(ArmId i, bool value) {
        const double v = value ? 1.0 : 0.0;
        const std::uint64_t n = rho_[i] + s_[i];
        if (n == 0) {
            mu_hat_[i] = v;
        } else {
            const double nd = static_cast<double>(n);
            mu_hat_[i] = (mu_hat_[i] * nd + v) / (nd + 1.0);
        }
    }

    std::size_t K_;
    double alpha_;
    std::vector<double> mu_hat_;
    std::vector<std::uint64_t> rho_;
    std::vector<std::uint64_t> s_;
    std::uint64_t t_ = 1;
    std::optional<Sample> pending_;
    std::optional<ArmId> awaiting_;
};

}  // namespace mdb
