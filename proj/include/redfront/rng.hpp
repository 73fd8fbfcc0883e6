#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace redfront {

/// Deterministic random stream: (seed, stream_id) fixes the full event
/// sequence. All variate algorithms are implemented here rather than via
/// std distributions, so output does not depend on the standard library.
class RngStream {
public:
    RngStream(uint64_t seed, uint64_t stream_id) : seed_(seed), stream_(stream_id) {
        std::seed_seq sq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(stream_id),
                         uint32_t(stream_id >> 32), 0x52464e47u};
        eng_.seed(sq);
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    uint64_t u64() { return eng_(); }

    /// Uniform on [0,1), 53-bit resolution.
    double unit() { return double(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1]; safe as a log() argument.
    double unit_pos() { return double((eng_() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(unit_pos()) / rate; }

    /// Uniform integer in {0, ..., n-1} (Lemire rejection, unbiased).
    uint32_t below(uint32_t n) {
        uint64_t x = eng_();
        __uint128_t m = __uint128_t(uint64_t(n)) * __uint128_t(x);
        uint64_t lo = uint64_t(m);
        if (lo < n) {
            uint64_t t = (-uint64_t(n)) % n;
            while (lo < t) {
                x = eng_();
                m = __uint128_t(uint64_t(n)) * __uint128_t(x);
                lo = uint64_t(m);
            }
        }
        return uint32_t(m >> 64);
    }

    bool bernoulli(double p) { return unit() < p; }

    /// Poisson variate; mean split into chunks so Knuth's product stays
    /// inside double range.
    uint64_t poisson(double mean) {
        uint64_t total = 0;
        while (mean > 60.0) {
            total += poisson_knuth(60.0);
            mean -= 60.0;
        }
        return total + poisson_knuth(mean);
    }

    /// Binomial(n, 1/2) by counting random bits.
    uint32_t binomial_half(uint32_t n) {
        uint32_t count = 0;
        while (n >= 64) {
            count += uint32_t(__builtin_popcountll(eng_()));
            n -= 64;
        }
        if (n > 0) count += uint32_t(__builtin_popcountll(eng_() >> (64 - n)));
        return count;
    }

private:
    uint64_t poisson_knuth(double mean) {
        if (mean <= 0) return 0;
        const double limit = std::exp(-mean);
        double prod = 1.0;
        uint64_t k = 0;
        do {
            ++k;
            prod *= unit();
        } while (prod > limit);
        return k - 1;
    }

    std::mt19937_64 eng_;
    uint64_t seed_;
    uint64_t stream_;
};

}  // namespace redfront
