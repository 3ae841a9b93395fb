#pragma once

#include <cstdint>
#include <random>

namespace ineq {

// splitmix64, used to derive independent sub-streams from one master seed.
// Replications / stages keyed by (seed, stream, index) get decorrelated
// generators regardless of evaluation order or thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Named sub-streams so pipeline stages can rerun independently while
// reproducing the exact same draws.
enum class Stream : std::uint64_t {
    Calib = 0x11,
    Bootstrap = 0x22,
    Microsim = 0x33,
    Fixture = 0x44,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(master ^ (0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(stream)));
    return splitmix64(s ^ splitmix64(index + 0x0123456789abcdefULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal(double mean = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mean, sd)(engine_);
    }
    // Uniform integer on [0, n)
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace ineq
