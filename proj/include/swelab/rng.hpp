#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace swelab {

/// Philox-4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so replications keyed by (seed, replication_id, index)
/// are reproducible under any parallel schedule.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              const std::array<std::uint32_t, 4>& counter) {
        constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        std::array<std::uint32_t, 4> c = counter;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * c[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * c[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += w0;
            k1 += w1;
        }
        return c;
    }
};

/// Standard normal draws from the counter stream (seed, replication_id);
/// index i is deterministic and independent of evaluation order. Each
/// Philox block yields two Box-Muller normals from two 64-bit uniforms.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t replication_id)
        : seed_(seed), rep_(replication_id) {}

    double operator()(std::uint64_t index) const {
        const std::uint64_t pair_index = index / 2;
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(pair_index),
            static_cast<std::uint32_t>(pair_index >> 32),
            static_cast<std::uint32_t>(rep_),
            static_cast<std::uint32_t>(rep_ >> 32)};
        const auto out = Philox4x32::block(seed_, ctr);
        const double u1 = to_unit(out[0], out[1]);
        const double u2 = to_unit(out[2], out[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        return (index % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
    }

  private:
    std::uint64_t seed_;
    std::uint64_t rep_;

    static double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
        // strictly inside (0, 1)
        return (static_cast<double>(bits) + 0.5) * 0x1p-64;
    }
};

} // namespace swelab
