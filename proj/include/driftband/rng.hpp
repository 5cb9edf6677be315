#pragma once

#include <cstdint>
#include <random>

namespace driftband {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used wherever a 64-bit
// seed has to be expanded or combined so that derived streams are decorrelated.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Per-trial seed: splitmix64 of master_seed advanced by the trial index.
// Documented in the README; re-implementations must match this to reproduce
// trajectories byte-for-byte.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return splitmix64(master_seed + 0x9e3779b97f4a7c15ull * (trial_index + 1));
}

// One episode consumes three independent substreams. Keeping reward noise,
// drift draws, and context draws on separate generators means disabling one
// channel (e.g. forcing ell_t = 0) leaves the others bit-identical, which the
// reduction checks rely on.
struct EpisodeRngs {
    std::mt19937_64 reward;
    std::mt19937_64 drift;
    std::mt19937_64 context;

    static EpisodeRngs from_seed(std::uint64_t seed) {
        EpisodeRngs r;
        r.reward.seed(splitmix64(seed ^ 0x72657761726421ull));
        r.drift.seed(splitmix64(seed ^ 0x6472696674652eull));
        r.context.seed(splitmix64(seed ^ 0x636f6e74657874ull));
        return r;
    }
};

} // namespace driftband
