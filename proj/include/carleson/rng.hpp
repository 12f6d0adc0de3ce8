#pragma once

#include <cstdint>

namespace carleson {

// Counter-based 64-bit generator (SplitMix64 applied to seed + k * golden
// gamma). Stateless in the counter, so corpora are reproducible across
// platforms and languages. Test vectors: see tests/test_corpus.cpp and the
// README.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
        std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(seed_, counter_++); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [a, b).
    double next_double(double a, double b) { return a + (b - a) * next_double(); }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace carleson
