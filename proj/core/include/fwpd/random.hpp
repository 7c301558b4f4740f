#pragma once

#include <cstdint>
#include <random>

namespace fwpd {

// All stochastic components draw from std::mt19937_64 seeded through this
// helper so that a single base seed reproduces every artifact of a run.
// Component tags keep the mask stream, the init stream, etc. independent.
enum class seed_tag : std::uint64_t {
    mask = 0x6d61736bULL,        // "mask"
    kmeans_init = 0x696e6974ULL, // "init"
    generic = 0x67656e72ULL,     // "genr"
};

// splitmix64 finalizer: decorrelates consecutive seeds and mixes the tag in.
inline std::uint64_t mix_seed(std::uint64_t seed, seed_tag tag) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(tag) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, seed_tag tag = seed_tag::generic) {
    return std::mt19937_64(mix_seed(seed, tag));
}

} // namespace fwpd
