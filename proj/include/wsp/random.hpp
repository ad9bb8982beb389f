#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace wsp {

/// One SplitMix64 step; used to derive independent seeds from a base seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded generator whose output is identical on every platform.
/// std::mt19937_64 is fully specified by the standard; the distribution
/// helpers below replace the implementation-defined std ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound), bound > 0. Rejection sampling on the top of the range.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Durstenfeld shuffle of the first `count` positions: afterwards
    /// items[0..count) is a uniform random `count`-subset in random order.
    template <class T>
    void partial_shuffle(std::span<T> items, std::size_t count) {
        for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
            std::size_t j = i + below(items.size() - i);
            std::swap(items[i], items[j]);
        }
    }

    template <class T>
    void shuffle(std::span<T> items) {
        partial_shuffle(items, items.size());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace wsp
