#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dbmid {

// Self-contained splitmix64/xoshiro256** generator. The standard library
// distributions are not pinned across implementations, and dataset
// regeneration must be byte-identical, so all randomness in the project
// goes through this.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
        has_spare_ = false;
        spare_ = 0.0;
    }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Deterministic seed derivation for per-sample streams.
    static uint64_t mix(uint64_t seed, uint64_t index) {
        uint64_t x = seed ^ (0x9e3779b97f4a7c15ull + index * 0xbf58476d1ce4e5b9ull);
        (void)splitmix64(x);
        return splitmix64(x);
    }

    uint64_t next_u64() {
        uint64_t& s0 = state_[0];
        uint64_t& s1 = state_[1];
        uint64_t& s2 = state_[2];
        uint64_t& s3 = state_[3];
        const uint64_t result = rotl(s1 * 5, 7) * 9;
        const uint64_t t = s1 << 17;
        s2 ^= s0;
        s3 ^= s1;
        s1 ^= s2;
        s0 ^= s3;
        s2 ^= t;
        s3 = rotl(s3, 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n ? next_u64() % n : 0; }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + int(below(uint64_t(hi - lo + 1)));
    }

    bool coin() { return (next_u64() & 1u) != 0; }

    // Standard normal via Box-Muller (polar form avoided: plain form is
    // branch-free and fully determined by the uniform stream).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
    double spare_;
    bool has_spare_;
};

}  // namespace dbmid
