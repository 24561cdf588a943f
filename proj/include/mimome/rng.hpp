#pragma once

// Counter-based random numbers: every variate is a pure function of its
// key, so draws can be regenerated in any order and reproduce bit-exactly.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace mimome::rng {

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c, std::uint64_t d = 0) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(a + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
    h = mix64(h ^ mix64(c + 0xa7a1b4b9c4a3d5e1ULL));
    h = mix64(h ^ mix64(d + 0xd1b54a32d192ed03ULL));
    return h;
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
constexpr double to_unit_open(std::uint64_t w) noexcept {
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

/// Two independent standard normals (Box-Muller) for one key.
inline std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                             std::uint64_t c) noexcept {
    const double u1 = to_unit_open(hash_key(seed, a, b, c, 0));
    const double u2 = to_unit_open(hash_key(seed, a, b, c, 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

/// Sequential view over the counter space for one (seed, stream) pair.
/// Used for auxiliary randomness (random covariances in property trials).
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

    double uniform() noexcept { return to_unit_open(hash_key(seed_, stream_, counter_++, 0x5eed)); }

    double normal() noexcept {
        const auto [x, y] = normal_pair(seed_, stream_, counter_++, 0xa0a0);
        (void)y;
        return x;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace mimome::rng
