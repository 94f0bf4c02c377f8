#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ppsr {

/// Seeded Gaussian/uniform source. The normal transform is an explicit
/// Box-Muller over the standardized mt19937_64 stream, so a given seed
/// produces the same values on every platform and standard library.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n > 0.
    std::uint64_t bounded(std::uint64_t n) {
        return std::uint64_t((__uint128_t(gen_()) * n) >> 64);
    }

    // Standard normal.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = double((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = double(gen_() >> 11) * 0x1.0p-53;        // [0, 1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ppsr
