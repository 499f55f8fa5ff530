#pragma once

#include <cstdint>

namespace anonsense {

// Counter-based SplitMix64. Every draw is addressed by (seed, stream, index),
// so any element of any stream can be generated independently and the result
// does not depend on the order or thread in which draws are made.
//
// Stream assignment used across the library:
//   stream 0      field draws (index = site)
//   stream r + 1  Monte Carlo repetition r (index = copy)
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t at(std::uint64_t index) const noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double unit_at(std::uint64_t index) const noexcept;

    std::uint64_t next() noexcept { return at(counter_++); }
    double next_unit() noexcept { return unit_at(counter_++); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

constexpr double bits_to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace anonsense
