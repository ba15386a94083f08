#pragma once

// Stochastic multi-dueling simulator and preference-matrix file loader.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mdb/core_model.hpp"
#include "mdb/errors.hpp"
#include "mdb/rng.hpp"

namespace mdb {

/// The arm subset played at one step.
///
/// `arms` is always sorted and de-duplicated. Two-dueling policies also record
/// the ordered pair they chose; a pair (a, a) collapses to the singleton {a}.
class ComparisonSet {
public:
    struct Pair {
        ArmId left;
        ArmId right;
    };

    static ComparisonSet of(std::vector<ArmId> arms) {
        std::sort(arms.begin(), arms.end());
        arms.erase(std::unique(arms.begin(), arms.end()), arms.end());
        return ComparisonSet(std::move(arms), std::nullopt);
    }

    static ComparisonSet pair(ArmId left, ArmId right) {
        std::vector<ArmId> arms{left};
        if (right != left) arms.push_back(right);
        std::sort(arms.begin(), arms.end());
        return ComparisonSet(std::move(arms), Pair{left, right});
    }

    const std::vector<ArmId>& arms() const noexcept { return arms_; }
    std::size_t size() const noexcept { return arms_.size(); }
    const std::optional<Pair>& declared_pair() const noexcept { return pair_; }

    bool contains(ArmId a) const { return std::binary_search(arms_.begin(), arms_.end(), a); }

private:
    ComparisonSet(std::vector<ArmId> arms, std::optional<Pair> pair)
        : arms_(std::move(arms)), pair_(pair) {}

    std::vector<ArmId> arms_;
    std::optional<Pair> pair_;
};

/// One realized comparison. For a declared pair, `i` is the left arm and `j`
/// the right arm. i == j only for a two-dueling self-duel (a fair coin).
struct DuelOutcome {
    ArmId i;
    ArmId j;
    bool i_won;

    ArmId winner() const noexcept { return i_won ? i : j; }
    ArmId loser() const noexcept { return i_won ? j : i; }
    bool self_duel() const noexcept { return i == j; }
};

/// Expected per-step regret of playing `arms`: mean gap of the best arm over them.
inline double regret_increment(const GapTable& gaps, const std::vector<ArmId>& arms) {
    double sum = 0.0;
    for (ArmId a : arms) sum += gaps.of(a);
    return sum / static_cast<double>(arms.size());
}

class Environment {
public:
    Environment(PreferenceMatrix P, std::size_t m, std::uint64_t seed)
        : P_(std::move(P)), gaps_(P_), m_(m), rng_(seed) {
        if (m_ < 2 || m_ > P_.size()) {
            throw ConfigError("comparison set size m must satisfy 2 <= m <= K");
        }
    }

    /// Plays `A`: samples every pairwise outcome and accrues regret.
    std::vector<DuelOutcome> step(const ComparisonSet& A) {
        if (A.size() == 0) throw ContractViolation("step: empty comparison set");
        if (A.size() > m_) throw ContractViolation("step: comparison set larger than m");
        for (ArmId a : A.arms()) {
            if (a >= P_.size()) throw ContractViolation("step: arm index out of range");
        }

        std::vector<DuelOutcome> outcomes;
        if (const auto& pair = A.declared_pair()) {
            const double p = pair->left == pair->right ? 0.5 : P_(pair->left, pair->right);
            outcomes.push_back({pair->left, pair->right, rng_.bernoulli(p)});
        } else {
            const auto& arms = A.arms();
            outcomes.reserve(arms.size() * (arms.size() - 1) / 2);
            for (std::size_t a = 0; a < arms.size(); ++a) {
                for (std::size_t b = a + 1; b < arms.size(); ++b) {
                    const ArmId i = arms[a];
                    const ArmId j = arms[b];
                    outcomes.push_back({i, j, rng_.bernoulli(P_(i, j))});
                }
            }
        }

        cumulative_regret_ += regret_increment(gaps_, A.arms());
        ++t_;
        return outcomes;
    }

    /// Restarts the run: new random stream, zero regret, t = 0.
    void reseed(std::uint64_t seed) {
        rng_.reseed(seed);
        cumulative_regret_ = 0.0;
        t_ = 0;
    }

    const PreferenceMatrix& matrix() const noexcept { return P_; }
    const GapTable& gap_table() const noexcept { return gaps_; }
    std::size_t num_arms() const noexcept { return P_.size(); }
    std::size_t max_set_size() const noexcept { return m_; }
    double cumulative_regret() const noexcept { return cumulative_regret_; }
    std::uint64_t time() const noexcept { return t_; }
    std::uint64_t seed() const noexcept { return rng_.seed(); }
    Rng& rng() noexcept { return rng_; }
    const Rng& rng() const noexcept { return rng_; }

private:
    PreferenceMatrix P_;
    GapTable gaps_;
    std::size_t m_;
    Rng rng_;
    double cumulative_regret_ = 0.0;
    std::uint64_t t_ = 0;
};

/// Reads a K x K grid (comma or whitespace separated, `#` comment lines).
///
/// The best arm is the Condorcet winner when one exists, otherwise
/// `declared_best`. Diagonal entries within tolerance of 1/2 are snapped to 1/2.
inline PreferenceMatrix parse_matrix(std::istream& in, std::optional<ArmId> declared_best = {}) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw ValidationError("line " + std::to_string(line_no) + ": '" + token +
                                      "' is not a number");
            }
            row.push_back(value);
        }
        rows.push_back(std::move(row));
    }

    const std::size_t K = rows.size();
    if (K < 2) throw ValidationError("matrix must have at least 2 rows");
    std::vector<double> flat;
    flat.reserve(K * K);
    for (std::size_t r = 0; r < K; ++r) {
        if (rows[r].size() != K) {
            throw ValidationError("row " + std::to_string(r + 1) + " has " +
                                  std::to_string(rows[r].size()) + " entries, expected " +
                                  std::to_string(K));
        }
        for (std::size_t c = 0; c < K; ++c) {
            double v = rows[r][c];
            if (r == c) {
                if (std::abs(v - 0.5) > kMatrixTolerance) {
                    throw ValidationError("diagonal entry (" + std::to_string(r + 1) + "," +
                                          std::to_string(c + 1) + ") must be 1/2");
                }
                v = 0.5;
            }
            flat.push_back(v);
        }
    }

    // Validate symmetry and range before looking for a winner.
    const PreferenceMatrix unchecked(K, flat, 0, false);
    if (auto winner = unchecked.condorcet_winner()) {
        return PreferenceMatrix(K, std::move(flat), *winner);
    }
    if (declared_best) {
        if (*declared_best >= K) throw ValidationError("declared best arm out of range");
        return PreferenceMatrix(K, std::move(flat), *declared_best, false);
    }

    std::string msg = "no Condorcet winner:";
    for (std::size_t r = 0; r < K; ++r) {
        msg += "\n  arm " + std::to_string(r + 1) + " does not beat:";
        for (std::size_t c = 0; c < K; ++c) {
            if (c != r && !(unchecked(r, c) > 0.5)) msg += " " + std::to_string(c + 1);
        }
    }
    throw ValidationError(msg);
}

inline PreferenceMatrix load_matrix(const std::string& path,
                                    std::optional<ArmId> declared_best = {}) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file '" + path + "'");
    return parse_matrix(in, declared_best);
}

}  // namespace mdb
