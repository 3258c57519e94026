#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hvs/core.hpp"

namespace hvs {

namespace detail {

// splitmix64 (Steele, Lea, Flood 2014), used to expand the user seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman, Vigna 2019). Fixed here so series are portable
// across platforms; the exact procedure is documented in FORMAT.md.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in (0,1].
    double next_unit_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
    // Uniform double in [0,1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace detail

/// The 4096-entry integer perturbation series with its provenance. Generated
/// once per (sigma, seed) and reused for every CU of a decode.
struct RpSeries {
    static constexpr std::size_t kLength = 4096;  // one entry per pixel of a 64x64 CU

    std::vector<std::int32_t> values;
    double mu = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    double achieved_mean = 0.0;
    double achieved_std = 0.0;
};

/// Draws 4096 integers from a seeded Normal(0, sigma) via Box-Muller,
/// rounding ties away from zero. If the rounded set misses |mean| <= 0.1 or
/// |std - sigma| <= 0.1, the whole set is redrawn from the advancing
/// generator state (at most 1000 attempts).
inline RpSeries generate_rp_series(double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.5 && sigma <= 64.0)) throw Error("rp sigma out of range [0.5,64]");

    constexpr int kMaxAttempts = 1000;
    constexpr double kTol = 0.1;
    const std::size_t n = RpSeries::kLength;

    detail::Xoshiro256pp rng(seed);
    std::vector<std::int32_t> values(n);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (std::size_t i = 0; i < n; i += 2) {
            const double u1 = rng.next_unit_open();
            const double u2 = rng.next_unit();
            const double radius = std::sqrt(-2.0 * std::log(u1)) * sigma;
            const double angle = 2.0 * 3.14159265358979323846 * u2;
            values[i] = static_cast<std::int32_t>(std::llround(radius * std::cos(angle)));
            if (i + 1 < n)
                values[i + 1] = static_cast<std::int32_t>(std::llround(radius * std::sin(angle)));
        }
        double sum = 0.0;
        for (const auto v : values) sum += v;
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (const auto v : values) sq += (v - mean) * (v - mean);
        const double sd = std::sqrt(sq / static_cast<double>(n - 1));
        if (std::abs(mean) <= kTol && std::abs(sd - sigma) <= kTol) {
            RpSeries out;
            out.values = std::move(values);
            out.sigma = sigma;
            out.seed = seed;
            out.achieved_mean = mean;
            out.achieved_std = sd;
            return out;
        }
    }
    throw Error("rp series statistics not met within attempt bound");
}

/// Audit format: one signed integer per line, 4096 lines.
inline void dump_series(const RpSeries& series, std::ostream& os) {
    for (const auto v : series.values) os << v << "\n";
}

inline std::vector<std::int32_t> load_series_values(std::istream& is) {
    std::vector<std::int32_t> values;
    values.reserve(RpSeries::kLength);
    long long v = 0;
    while (is >> v) values.push_back(static_cast<std::int32_t>(v));
    if (values.size() != RpSeries::kLength)
        throw Error("rp series file must contain exactly 4096 integers");
    return values;
}

}  // namespace hvs
