#pragma once

// Counter-based Philox4x32-10 generator and the Gaussian noise source built
// on it. Every normal deviate is a pure function of
// (seed, path, step, mode, refinement level, sub-interval), so coupled and
// parallel runs see identical increments regardless of scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace avgsfpde {

class Philox4x32 {
public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static constexpr counter_type apply(counter_type ctr, key_type key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Uniform on the open interval (0, 1): 52 random bits, offset by half a
/// unit so both endpoints are excluded after rounding.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (std::uint64_t{hi >> 6} << 26) | (lo >> 6);
    return (static_cast<double>(bits) + 0.5) * 0x1p-52;
}

/// Standard normals addressed by coordinates instead of by draw order.
class NoiseSource {
public:
    NoiseSource(std::uint64_t seed, std::uint64_t path_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path_id)),
          path_hi_(static_cast<std::uint32_t>(path_id >> 32)) {}

    /// `level` and `sub` address the dyadic Brownian-bridge refinement used by
    /// step halving; level 0 is the base increment.
    double normal(std::uint64_t step, std::uint32_t mode, std::uint32_t level = 0,
                  std::uint32_t sub = 0) const noexcept {
        const std::uint32_t pair = mode >> 1;
        const Philox4x32::counter_type ctr{
            static_cast<std::uint32_t>(step),
            (pair & 0xFFFFu) | ((level & 0xFu) << 16) | ((sub & 0xFFFu) << 20),
            path_lo_ ^ static_cast<std::uint32_t>(step >> 32), path_hi_};
        const auto out = Philox4x32::apply(ctr, key_);
        const double u1 = to_open_unit(out[0], out[1]);
        const double u2 = to_open_unit(out[2], out[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return (mode & 1u) ? r * std::sin(angle) : r * std::cos(angle);
    }

    std::uint64_t path_id() const noexcept {
        return (std::uint64_t{path_hi_} << 32) | path_lo_;
    }

private:
    Philox4x32::key_type key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
};

}  // namespace avgsfpde
