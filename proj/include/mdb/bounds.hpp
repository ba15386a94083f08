#pragma once

// Closed-form regret-bound quantities. Only explicit terms are computed;
// O(.) tails with unspecified constants are left out.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mdb/core_model.hpp"
#include "mdb/errors.hpp"

namespace mdb {

struct InstanceComplexity {
    double H = 0.0;
    double D = 0.0;
    std::uint64_t C_m2 = 0;
    /// Gap of the best arm over each suboptimal arm, in arm order.
    std::vector<double> delta_vector;
    /// delta(i, j) for every unordered pair of suboptimal arms i < j.
    std::vector<double> delta_pairs;
};

namespace detail {

inline std::vector<ArmId> suboptimal_arms(const GapTable& g) {
    std::vector<ArmId> out;
    for (ArmId i = 0; i < g.size(); ++i) {
        if (i != g.best_arm()) out.push_back(i);
    }
    return out;
}

inline void require_positive_gaps(const GapTable& g) {
    for (ArmId i : suboptimal_arms(g)) {
        if (!(g.of(i) > 0.0)) {
            throw DegenerateInstance("arm " + std::to_string(i + 1) +
                                     " has a non-positive gap to the best arm");
        }
    }
}

/// sum over suboptimal i of 1 / delta_i^2.
inline double inverse_square_gap_sum(const GapTable& g) {
    double s = 0.0;
    for (ArmId i : suboptimal_arms(g)) s += 1.0 / (g.of(i) * g.of(i));
    return s;
}

}  // namespace detail

/// H = sum over suboptimal arms of 1 / delta_i^2.
inline double complexity_H(const GapTable& g) {
    detail::require_positive_gaps(g);
    return detail::inverse_square_gap_sum(g);
}

inline std::uint64_t pairs_in_set(std::size_t m) { return static_cast<std::uint64_t>(m) * (m - 1) / 2; }

/// D = sum_i 4 alpha / delta_i^2 + sum_{i<j} 4 alpha / (C_m^2 delta_ij^2), both
/// sums over suboptimal arms only.
inline InstanceComplexity instance_complexity(const GapTable& g, double alpha, std::size_t m) {
    if (m < 2 || m > g.size()) throw ArgumentError("instance_complexity: need 2 <= m <= K");
    detail::require_positive_gaps(g);
    InstanceComplexity out;
    out.C_m2 = pairs_in_set(m);
    const auto sub = detail::suboptimal_arms(g);
    for (ArmId i : sub) out.delta_vector.push_back(g.of(i));
    out.H = detail::inverse_square_gap_sum(g);

    double pair_sum = 0.0;
    for (std::size_t a = 0; a < sub.size(); ++a) {
        for (std::size_t b = a + 1; b < sub.size(); ++b) {
            const double d = g(sub[a], sub[b]);
            if (d == 0.0) {
                throw DegenerateInstance("arms " + std::to_string(sub[a] + 1) + " and " +
                                         std::to_string(sub[b] + 1) + " are indistinguishable");
            }
            out.delta_pairs.push_back(d);
            pair_sum += 1.0 / (d * d);
        }
    }
    out.D = 4.0 * alpha * out.H + 4.0 * alpha * pair_sum / static_cast<double>(out.C_m2);
    return out;
}

/// MultiRUCB expected-regret bound at horizon T (T need not be an integer).
inline double multirucb_bound(const GapTable& g, double alpha, std::size_t m, double T) {
    if (!(alpha > 1.0)) throw ArgumentError("multirucb_bound: alpha must exceed 1");
    if (!(T >= 2.0)) {
        throw ArgumentError("multirucb_bound: horizon must be at least 2");
    }
    const InstanceComplexity c = instance_complexity(g, alpha, m);
    const double K = static_cast<double>(g.size());
    const double dmax = g.delta_max();
    const double log_T = std::log(T);

    const double e = 2.0 * alpha - 1.0;
    const double burn_in = std::pow(2.0 * (4.0 * alpha - 1.0) * K * K / e, 1.0 / e) *
                           (e / (alpha - 1.0)) * dmax;

    const double first = c.D * dmax * log_T;
    const double md = static_cast<double>(m);
    const double second = (8.0 + 2.0 * c.D * std::log(2.0 * c.D)) * dmax +
                          (md + 1.0) / (md - 1.0) * 4.0 * alpha * dmax * c.H * log_T;
    return burn_in + std::min(first, second);
}

/// Explicit terms of the MultiSBM-Feedback bound:
/// min{sum (alpha+2) dmax / delta_i^2, sum 2 (alpha+2) / delta_i} ln T + (alpha+8) dmax K / (2 alpha).
inline double multisbm_feedback_leading_bound(const GapTable& g, double alpha, double T) {
    if (!(alpha >= 3.0)) throw ArgumentError("multisbm_feedback_leading_bound: alpha must be >= 3");
    if (!(T > 1.0)) throw ArgumentError("multisbm_feedback_leading_bound: horizon must exceed 1");
    detail::require_positive_gaps(g);
    const double dmax = g.delta_max();
    double quad = 0.0;
    double lin = 0.0;
    for (ArmId i : detail::suboptimal_arms(g)) {
        quad += (alpha + 2.0) * dmax / (g.of(i) * g.of(i));
        lin += 2.0 * (alpha + 2.0) / g.of(i);
    }
    const double K = static_cast<double>(g.size());
    return std::min(quad, lin) * std::log(T) + (alpha + 8.0) * dmax / (2.0 * alpha) * K;
}

/// C(delta) = ((4 alpha - 1) K^2 / ((2 alpha - 1) delta))^(1 / (2 alpha - 1)).
inline double confidence_horizon_C(double delta, double alpha, std::size_t K) {
    if (!(alpha > 0.5)) throw ArgumentError("confidence_horizon_C: alpha must exceed 1/2");
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw ArgumentError("confidence_horizon_C: delta must be in (0,1]");
    }
    const double e = 2.0 * alpha - 1.0;
    const double Kd = static_cast<double>(K);
    return std::pow((4.0 * alpha - 1.0) * Kd * Kd / (e * delta), 1.0 / e);
}

/// Upper bound 2C + 2D ln(2D) on the hypothesis-latching time.
inline double t_hat_bound(double C, double D) {
    if (!(D > 2.0)) throw ArgumentError("t_hat_bound: D must exceed 2");
    return 2.0 * C + 2.0 * D * std::log(2.0 * D);
}

}  // namespace mdb
