#pragma once

// Ground-truth instance description: utilities, link functions, preference
// matrices and gap quantities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdb/errors.hpp"

namespace mdb {

/// 0-based arm index. Everything user-facing (files, CLI output) is 1-based.
using ArmId = std::size_t;

inline constexpr double kMatrixTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;

enum class LinkKind { Linear, Natural, Logit };

inline std::string_view to_string(LinkKind kind) {
    switch (kind) {
        case LinkKind::Linear: return "linear";
        case LinkKind::Natural: return "natural";
        case LinkKind::Logit: return "logit";
    }
    return "?";
}

inline std::optional<LinkKind> parse_link(std::string_view name) {
    if (name == "linear") return LinkKind::Linear;
    if (name == "natural") return LinkKind::Natural;
    if (name == "logit") return LinkKind::Logit;
    return std::nullopt;
}

/// phi(u, v): probability that an arm with utility u beats one with utility v.
inline double eval_link(LinkKind kind, double u, double v) {
    if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0)) {
        throw DomainError("eval_link: utilities must lie in [0,1]");
    }
    switch (kind) {
        case LinkKind::Linear:
            return (u - v + 1.0) / 2.0;
        case LinkKind::Natural:
            // 0/0 at u = v = 0 is taken as 1/2 by continuity.
            if (u + v == 0.0) return 0.5;
            return u / (u + v);
        case LinkKind::Logit:
            return 1.0 / (1.0 + std::exp(v - u));
    }
    throw DomainError("eval_link: unknown link kind");
}

/// Expected latent utilities. Entry 0 must be the unique maximum.
class UtilityVector {
public:
    explicit UtilityVector(std::vector<double> mu) : mu_(std::move(mu)) {
        if (mu_.size() < 2) {
            throw ArgumentError("UtilityVector: need at least 2 arms");
        }
        for (double x : mu_) {
            if (!(x >= 0.0 && x <= 1.0)) {
                throw ArgumentError("UtilityVector: utilities must lie in [0,1]");
            }
        }
        for (std::size_t i = 1; i < mu_.size(); ++i) {
            if (!(mu_[0] > mu_[i])) {
                throw ArgumentError("UtilityVector: entry 0 must be strictly maximal");
            }
        }
    }

    std::size_t size() const noexcept { return mu_.size(); }
    double operator[](std::size_t i) const { return mu_[i]; }
    std::span<const double> values() const noexcept { return mu_; }

private:
    std::vector<double> mu_;
};

/// Geometric synthetic instance: mu[0] = 0.8, mu[1..K-1] geometric from 0.7 to 0.2.
inline UtilityVector synthetic_utilities(std::size_t K) {
    if (K < 3) {
        throw ArgumentError("synthetic_utilities: K must be at least 3");
    }
    std::vector<double> mu(K);
    mu[0] = 0.8;
    const double ratio = std::pow(0.2 / 0.7, 1.0 / static_cast<double>(K - 2));
    for (std::size_t i = 1; i < K; ++i) {
        mu[i] = 0.7 * std::pow(ratio, static_cast<double>(i - 1));
    }
    mu[K - 1] = 0.2;
    return UtilityVector(std::move(mu));
}

/// K x K win-probability matrix with a designated best arm.
///
/// Invariants: p_ii = 1/2 exactly; p_ij + p_ji = 1 within kMatrixTolerance;
/// all entries in [0,1]. When `require_condorcet` is set at construction the
/// best arm must beat every other arm with probability > 1/2.
class PreferenceMatrix {
public:
    PreferenceMatrix(std::size_t K, std::vector<double> p, ArmId best_arm,
                     bool require_condorcet = true)
        : K_(K), p_(std::move(p)), best_(best_arm) {
        if (K_ < 2) throw ValidationError("preference matrix needs K >= 2");
        if (p_.size() != K_ * K_) throw ValidationError("preference matrix is not K x K");
        if (best_ >= K_) throw ValidationError("best arm index out of range");
        for (std::size_t i = 0; i < K_; ++i) {
            for (std::size_t j = 0; j < K_; ++j) {
                const double x = at(i, j);
                if (!(x >= 0.0 && x <= 1.0)) {
                    throw ValidationError("entry (" + std::to_string(i + 1) + "," +
                                          std::to_string(j + 1) + ") outside [0,1]");
                }
            }
            if (at(i, i) != 0.5) {
                throw ValidationError("diagonal entry (" + std::to_string(i + 1) + "," +
                                      std::to_string(i + 1) + ") must be 1/2");
            }
        }
        if (auto cell = first_asymmetry()) {
            throw ValidationError("asymmetric entries at cell (" + std::to_string(cell->first + 1) +
                                  "," + std::to_string(cell->second + 1) + "): p_ij + p_ji != 1");
        }
        if (require_condorcet && !is_condorcet_winner(best_)) {
            throw ValidationError("arm " + std::to_string(best_ + 1) +
                                  " is not a Condorcet winner");
        }
    }

    std::size_t size() const noexcept { return K_; }
    ArmId best_arm() const noexcept { return best_; }
    double operator()(ArmId i, ArmId j) const { return at(i, j); }
    std::span<const double> row(ArmId i) const { return {p_.data() + i * K_, K_}; }

    bool is_condorcet_winner(ArmId i) const {
        for (std::size_t j = 0; j < K_; ++j) {
            if (j != i && !(at(i, j) > 0.5)) return false;
        }
        return true;
    }

    std::optional<ArmId> condorcet_winner() const {
        for (std::size_t i = 0; i < K_; ++i) {
            if (is_condorcet_winner(i)) return i;
        }
        return std::nullopt;
    }

private:
    double at(std::size_t i, std::size_t j) const { return p_[i * K_ + j]; }

    std::optional<std::pair<std::size_t, std::size_t>> first_asymmetry() const {
        for (std::size_t i = 0; i < K_; ++i) {
            for (std::size_t j = i + 1; j < K_; ++j) {
                if (std::abs(at(i, j) + at(j, i) - 1.0) > kMatrixTolerance) return {{i, j}};
            }
        }
        return std::nullopt;
    }

    std::size_t K_;
    std::vector<double> p_;
    ArmId best_;
};

inline PreferenceMatrix build_preference_matrix(const UtilityVector& mu, LinkKind kind) {
    const std::size_t K = mu.size();
    std::vector<double> p(K * K);
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < K; ++j) {
            p[i * K + j] = (i == j) ? 0.5 : eval_link(kind, mu[i], mu[j]);
        }
    }
    return PreferenceMatrix(K, std::move(p), 0);
}

/// delta(i, j) = p_ij - 1/2.
class GapTable {
public:
    explicit GapTable(const PreferenceMatrix& P)
        : K_(P.size()), best_(P.best_arm()), delta_(K_ * K_) {
        for (std::size_t i = 0; i < K_; ++i) {
            for (std::size_t j = 0; j < K_; ++j) {
                delta_[i * K_ + j] = (i == j) ? 0.0 : P(i, j) - 0.5;
            }
        }
        delta_max_ = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < K_; ++i) {
            if (i != best_) delta_max_ = std::max(delta_max_, (*this)(best_, i));
        }
    }

    std::size_t size() const noexcept { return K_; }
    ArmId best_arm() const noexcept { return best_; }
    double operator()(ArmId i, ArmId j) const { return delta_[i * K_ + j]; }
    /// Gap of the best arm over arm i.
    double of(ArmId i) const { return (*this)(best_, i); }
    double delta_max() const noexcept { return delta_max_; }

private:
    std::size_t K_;
    ArmId best_;
    std::vector<double> delta_;
    double delta_max_;
};

inline GapTable gaps(const PreferenceMatrix& P) { return GapTable(P); }

struct Property1Result {
    bool holds = true;
    ArmId worst_i = 0;
    ArmId worst_j = 0;
    /// max over (i,j) of delta_best,i - gamma (delta_best,j - delta_ij); <= 0 when it holds.
    double worst_violation = -std::numeric_limits<double>::infinity();
};

/// Checks delta(best,i) <= gamma * (delta(best,j) - delta(i,j)) for every pair.
/// Violations up to kIdentityTolerance are treated as rounding.
inline Property1Result check_property1(const PreferenceMatrix& P, double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("check_property1: gamma must be positive");
    const GapTable d(P);
    const ArmId b = P.best_arm();
    Property1Result out;
    for (std::size_t i = 0; i < P.size(); ++i) {
        for (std::size_t j = 0; j < P.size(); ++j) {
            const double v = d(b, i) - gamma * (d(b, j) - d(i, j));
            if (v > out.worst_violation) {
                out.worst_violation = v;
                out.worst_i = i;
                out.worst_j = j;
            }
        }
    }
    out.holds = out.worst_violation <= kIdentityTolerance;
    return out;
}

/// Smallest gamma for which check_property1 holds; +inf if none exists.
/// Assumes the best arm is a Condorcet winner (every lower bound on gamma).
inline double smallest_property1_gamma(const PreferenceMatrix& P) {
    const GapTable d(P);
    const ArmId b = P.best_arm();
    double gamma = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double lhs = d(b, i);
        if (lhs <= 0.0) continue;
        for (std::size_t j = 0; j < P.size(); ++j) {
            const double rhs = d(b, j) - d(i, j);
            if (rhs <= 0.0) return std::numeric_limits<double>::infinity();
            gamma = std::max(gamma, lhs / rhs);
        }
    }
    return gamma;
}

}  // namespace mdb
