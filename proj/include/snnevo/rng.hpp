#pragma once

// Deterministic random number streams for the simulator.
//
// Scheme "splitmix64/pcg32 v1": every stream used anywhere in the simulation
// is a PCG32 generator whose initial state is derived from the experiment
// seed and a stream tag via a splitmix64 finalizer. Streams with distinct
// tags are statistically independent, so per-bot generators can be created
// on the fly (tag = bot id offset) without coordinating with the rest of the
// simulation. Nothing in the simulation path reads the wall clock or OS
// entropy.

#include <cstdint>
#include <cmath>

namespace snnevo {

inline constexpr const char* kRngScheme = "splitmix64/pcg32 v1";

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used for seeding only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Minimal PCG32 (O'Neill 2014), 64-bit state, 32-bit output.
class Pcg32 {
public:
    Pcg32() : Pcg32(0x853C49E6748FEA9BULL, 0xDA3E39CB94B95BDBULL) {}

    Pcg32(std::uint64_t init_state, std::uint64_t init_seq) {
        state_ = 0u;
        inc_ = (init_seq << 1u) | 1u;
        next_u32();
        state_ += init_state;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    // Uniform draw on the open interval (0, 1). One 32-bit advance per draw;
    // the half-offset keeps 0 and 1 unreachable, so `r < b` has probability b
    // for b in [0, 1] and log(r) is always finite.
    double next_double() {
        return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32;
    }

    bool operator==(const Pcg32& other) const {
        return state_ == other.state_ && inc_ == other.inc_;
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

// Derives the generator for stream `tag` of the experiment seeded by `seed`.
// Tags in use: 0 = environment stream (spawns, poses, initial phenotypes,
// mutation draws), 1000 + id = the spontaneous-firing stream of bot `id`.
inline Pcg32 make_stream(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed;
    std::uint64_t base = splitmix64(s);
    std::uint64_t mix = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
    std::uint64_t init_state = splitmix64(mix);
    return Pcg32(init_state, tag);
}

inline constexpr std::uint64_t kEnvStream = 0;
inline constexpr std::uint64_t kBotStreamBase = 1000;

// Standard normal deviate via Box-Muller. Consumes exactly two uniform draws
// per call and keeps no cached state, so draw counts stay predictable.
template <class Rng>
double next_gaussian(Rng& rng) {
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

} // namespace snnevo
