#ifndef PEQS_RNG_HPP
#define PEQS_RNG_HPP

#include <cstdint>
#include <random>

namespace peqs {

// splitmix64 finalizer; decorrelates consecutive seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for realization i of a run keyed by base_seed.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(base_seed + index);
}

using rng_engine = std::mt19937_64;

inline rng_engine make_engine(std::uint64_t seed) { return rng_engine(seed); }

}  // namespace peqs

#endif
