#pragma once

// Counter-based generator built on the SplitMix64 finaliser. Draw t of a
// stream is mix(key + (t + 1) * kGamma), so any draw can be computed
// independently; sharding work never changes results.

#include <cstdint>

namespace qdetect::rng {

inline constexpr const char *kGeneratorId = "splitmix64-counter-v1";
inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Key of substream k of a seed: mix(mix(seed) ^ mix((k + 1) * kGamma)).
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed) ^ mix((stream + 1) * kGamma));
}

class CounterRng {
  public:
    explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(substream_key(seed, stream)) {
    }

    constexpr std::uint64_t at(std::uint64_t counter) const { return mix(key_ + (counter + 1) * kGamma); }

    /// Uniform in [0, 1) from the top 53 bits.
    constexpr double uniform_at(std::uint64_t counter) const {
        return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
    }

    double next_uniform() { return uniform_at(counter_++); }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qdetect::rng
