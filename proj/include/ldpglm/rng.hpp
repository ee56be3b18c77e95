#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ldpglm {

// Small counter-based generator (splitmix64). Seeding is O(1), so every
// user / row / chunk can own an independent stream derived from the master
// seed; parallel and serial execution then produce identical results.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

using Rng = SplitMix64;

inline std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    std::uint64_t z = h;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic stream id from a master seed and a path of indices,
// e.g. derive_seed(master, {kUserStream, user_index}).
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix_seed(0x243F6A8885A308D3ULL, master);
    for (std::uint64_t v : path) h = mix_seed(h, v);
    return h;
}

}  // namespace ldpglm
