#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace optbench {

/// All randomness flows from one master seed through named substreams, so
/// adding a stage never perturbs another stage's draws.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
    // FNV-1a over the name, folded with the master seed and finalized with
    // a splitmix64 round.
    std::uint64_t h = 1469598103934665603ull;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = h ^ (master + 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 substream(std::uint64_t master, std::string_view name) {
    return std::mt19937_64(substream_seed(master, name));
}

} // namespace optbench
