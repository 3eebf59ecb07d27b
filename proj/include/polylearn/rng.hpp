#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "polylearn/linalg.hpp"

namespace polylearn {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}
}  // namespace detail

/// Counter-based pseudorandom generator (SplitMix64 core). A generator is a
/// (key, counter) pair: output i depends only on the key and the counter, so
/// independent substreams can be derived deterministically with split(),
/// regardless of how much the parent stream has been consumed.
class Rng {
 public:
    explicit Rng(std::uint64_t seed) : key_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        return detail::mix64(z);
    }

    /// Uniform in [0,1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_double();  // (0,1], keeps the log finite
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    Vec gaussian_vector(int n) {
        Vec v(static_cast<std::size_t>(n));
        for (double& x : v) x = gaussian();
        return v;
    }

    /// Uniform direction on the unit sphere S^{n-1}.
    Vec unit_vector(int n) {
        for (;;) {
            Vec v = gaussian_vector(n);
            double nrm = norm(v);
            if (nrm > 1e-12) {
                scale_in_place(v, 1.0 / nrm);
                return v;
            }
        }
    }

    /// Uniform point in the unit ball of dimension n.
    Vec ball_point(int n) {
        Vec v = unit_vector(n);
        double r = std::pow(next_double(), 1.0 / n);
        scale_in_place(v, r);
        return v;
    }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
        limit -= limit % n;
        for (;;) {
            std::uint64_t v = next_u64();
            if (v < limit) return v % n;
        }
    }

    bool coin() { return (next_u64() & 1) != 0; }

    /// Independent substream; stable no matter how much this stream consumed.
    Rng split(std::uint64_t stream) const {
        return Rng(detail::mix64(key_ ^ (0x632be59bd9b4e019ULL + stream * 0x9e3779b97f4a7c15ULL)));
    }

 private:
    std::uint64_t key_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace polylearn
