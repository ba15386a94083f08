#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace mdb {

/// Per-run random stream. One seed determines both duel outcomes and the
/// policy's own random choices.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        seed_ = seed;
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                          static_cast<std::uint32_t>(seed >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    /// `count` distinct elements of `pool`, drawn uniformly without replacement.
    template <typename T>
    std::vector<T> sample(std::span<const T> pool, std::size_t count) {
        std::vector<T> items(pool.begin(), pool.end());
        count = std::min(count, items.size());
        for (std::size_t k = 0; k < count; ++k) {
            std::swap(items[k], items[k + below(items.size() - k)]);
        }
        items.resize(count);
        return items;
    }

    std::mt19937_64& engine() noexcept { return engine_; }

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace mdb
