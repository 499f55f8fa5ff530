#include "anonsense/rng.hpp"

namespace anonsense {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;
}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64_mix(seed ^ splitmix64_mix(stream * kStreamSalt + kGolden))) {}

// Element `index` of the SplitMix64 sequence whose state starts at key_.
std::uint64_t CounterRng::at(std::uint64_t index) const noexcept {
    return splitmix64_mix(key_ + (index + 1) * kGolden);
}

double CounterRng::unit_at(std::uint64_t index) const noexcept {
    return bits_to_unit(at(index));
}

}  // namespace anonsense
