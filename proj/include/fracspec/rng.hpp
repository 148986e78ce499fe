#pragma once

#include <cstdint>
#include <random>

namespace fracspec {

inline constexpr std::uint64_t default_seed = 0x5EED;

// Independent engine per (seed, stream index); results do not depend on
// which thread consumes which index.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x9E3779B9u};
    return std::mt19937_64(seq);
}

}  // namespace fracspec
