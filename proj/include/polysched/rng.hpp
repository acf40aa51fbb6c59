#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace polysched {

/// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the sub-stream `name` (and optional index) derived from `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(seed ^ h) + index);
}

/// mt19937_64 with portable draws (the standard distributions are not
/// reproducible across library implementations).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    Rng(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) : eng_(substream_seed(seed, name, index)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    /// exp of a uniform draw on [log a, log b]
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        for (;;) {
            std::uint64_t v = eng_();
            if (v < limit) return v % n;
        }
    }
    int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    bool coin(double p) { return uniform() < p; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace polysched
