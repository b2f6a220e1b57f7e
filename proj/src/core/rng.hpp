// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

namespace mlcspace {

// splitmix64 step: advances state and returns the mixed output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

// Seed of the index-th stream of a base seed: splitmix64(base ^ splitmix64(index)).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept
{
    std::uint64_t s = index;
    std::uint64_t t = base ^ splitmix64(s);
    return splitmix64(t);
}

// xoshiro256** (Blackman & Vigna), state filled from splitmix64(seed).
// Bounded integers use rejection on the modulo remainder; reals take the top 53 bits.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept
    {
        for (auto& w : s_) { w = splitmix64(seed); }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return next(); }

    result_type next() noexcept
    {
        auto const result = rotl(s_[1] * 5, 7) * 9;
        auto const t = s_[1] << 17U;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) noexcept
    {
        std::uint64_t const threshold = (0 - n) % n;
        for (;;) {
            auto x = next();
            if (x >= threshold) { return x % n; }
        }
    }

    // uniform in [lo, hi]
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept
    {
        auto const span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (span == 0) { return static_cast<std::int64_t>(next()); }
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span));
    }

    // uniform in [0, 1)
    double uniform01() noexcept { return static_cast<double>(next() >> 11U) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    // index drawn proportionally to non-negative weights (at least one positive)
    std::size_t weighted(std::span<double const> w) noexcept
    {
        double total = 0;
        for (auto x : w) { total += x; }
        double r = uniform01() * total;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (r < w[i]) { return i; }
            r -= w[i];
        }
        for (std::size_t i = w.size(); i > 0; --i) {
            if (w[i - 1] > 0) { return i - 1; }
        }
        return 0;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4] {};
};

} // namespace mlcspace
