#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "manifold_gdp/normal.hpp"

namespace mgdp {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Derives an independent stream seed from a master seed, a textual tag and an
/// index: splitmix64(master ^ fnv1a(tag) ^ splitmix64(index)). The same triple
/// always yields the same seed, so individual replicates can be re-run alone.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
    return detail::splitmix64(master ^ detail::fnv1a(tag) ^ detail::splitmix64(index));
}

/// Deterministic random stream. All floating-point draws are produced from
/// raw mt19937_64 output with fixed bit manipulation, and normal variates go
/// through the library quantile, so identical seeds give identical streams on
/// any platform.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on (0, 1), symmetric around 1/2.
    double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53; }

    /// Uniform on (0, 1].
    double uniform_closed() { return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53; }

    /// Standard normal via inverse CDF.
    double normal() { return norm_quantile(uniform()); }

    double normal(double stddev) { return stddev * normal(); }

    /// Normal conditioned on [lo, hi], via inverse CDF.
    double truncated_normal(double stddev, double lo, double hi) {
        double a = norm_cdf(lo / stddev);
        double b = norm_cdf(hi / stddev);
        double u = a + uniform() * (b - a);
        return stddev * norm_quantile(u);
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace mgdp
