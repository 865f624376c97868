#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace clab {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Seed of the named substream `name` of the root seed.
inline std::uint64_t substream_seed(std::uint64_t root, std::string_view name) noexcept {
    return splitmix64(root ^ splitmix64(fnv1a(name)));
}

/// Seed of the `index`-th block of a substream.
inline std::uint64_t block_seed(std::uint64_t stream, std::uint64_t index) noexcept {
    return splitmix64(stream + splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// mt19937_64 with platform-independent derived distributions
/// (std::uniform_*_distribution output is implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1].
    double signed_unit() { return 2.0 * uniform01() - 1.0; }

    /// Uniform integer in [0, n), rejection-sampled.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    std::int64_t in_range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace clab
