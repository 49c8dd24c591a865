#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace n2c {

// All randomness in the workbench flows from a single root seed. Components
// never share generator state; each derives its own stream with
// seed_for(root, domain, counter). The derivation is three chained
// splitmix64 steps, so any (domain, counter) pair yields an independent,
// reproducible stream.
enum class SeedDomain : std::uint64_t {
    kRoute = 1,
    kExpert = 2,
    kParamInit = 3,
    kDropout = 4,
    kShuffle = 5,
    kAugment = 6,
    kNoiseStudy = 7,
    kSynthetic = 8,
    kEpisode = 9,
    kTest = 100,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t seed_for(std::uint64_t root, SeedDomain domain, std::uint64_t counter) {
    std::uint64_t s = root;
    std::uint64_t a = splitmix64(s);
    s = a ^ (static_cast<std::uint64_t>(domain) * 0xD6E8FEB86659FD93ULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (counter * 0xCA5A826395121157ULL);
    return splitmix64(s);
}

// xoshiro256++ with hand-rolled distributions. The standard library's
// distributions are implementation-defined, which would tie reproducibility
// to a particular libstdc++; these are pinned bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
        spare_valid_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the spare is cached so draws come in
    // a fixed order regardless of caller pattern.
    double normal() {
        if (spare_valid_) {
            spare_valid_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        spare_valid_ = true;
        return r * std::cos(theta);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Uniform index in [0, n). Multiply-shift keeps it branch-free and
    // deterministic; the bias at n << 2^64 is immaterial here.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool spare_valid_ = false;
};

}  // namespace n2c
