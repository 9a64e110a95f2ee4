#pragma once

#include <cstdint>
#include <random>

namespace cumident {

using Rng = std::mt19937_64;

// splitmix64 finaliser; used to derive independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
{
    return mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ index);
}

}  // namespace cumident
