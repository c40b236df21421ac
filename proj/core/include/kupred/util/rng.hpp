#pragma once

#include <cstdint>
#include <random>

namespace kupred {

// Derives an independent stream seed from (master, index). Used everywhere a
// task fans out across bootstrap rounds, trees or restarts, so results are
// identical regardless of how tasks get scheduled onto threads.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    // splitmix64 over the combined word
    uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(uint64_t master, uint64_t index) {
    return std::mt19937_64(derive_seed(master, index));
}

} // namespace kupred
