#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace orct {

// Deterministic uniform sampling on top of std::mt19937_64. The engine's
// output sequence is fixed by the standard, and the double mapping below is
// ours, so results are identical across platforms and library versions
// (std::uniform_real_distribution makes no such guarantee).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform on {0, ..., n-1} via rejection, unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t reject_under = (0 - n) % n;  // 2^64 mod n
        std::uint64_t v;
        do {
            v = eng_();
        } while (v < reject_under);
        return v % n;
    }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace orct
