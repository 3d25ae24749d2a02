#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace glem {

/// Counter-based pseudo-random generator. Output i of stream s is a fixed
/// bijective mix of (seed, s, i), so streams are independent, random-access
/// and identical on every platform. Used wherever a seed appears in an
/// interface so that derived artifacts are reproducible bit for bit.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : base_(mix(mix(seed) ^ mix(~stream))), counter_(0) {}

    std::uint64_t next_u64() noexcept {
        return mix(base_ + 0x9e3779b97f4a7c15ULL * ++counter_);
    }

    /// Uniform in [0, bound), bound >= 1. Unbiased (rejection sampling).
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v = next_u64();
        while (v >= limit)
            v = next_u64();
        return v % bound;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal (Box-Muller, pair cached).
    double next_gaussian() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0)
            u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices drawn uniformly from {0, ..., n-1}, ascending.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t base_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace glem
