#pragma once

#include <cstdint>

namespace flattop {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based stream keyed by (seed, replication, purpose). Draw k of a
/// stream is a pure function of the key and k, so a replication produces
/// the same numbers whichever worker runs it.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t purpose)
        : key_(mix64(mix64(mix64(seed) ^ replication) ^ (purpose * 0xD6E8FEB86659FD93ULL))) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace flattop
