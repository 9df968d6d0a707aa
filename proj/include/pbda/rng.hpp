#pragma once

#include <algorithm>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pbda {

// 64-bit finalizer (splitmix64). Used both as a mixer for seed derivation and
// as the output function of Rng below.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent stream seed from a master seed plus a salt (job index, group
// key hash, ...). Stream contents do not depend on the order streams are
// created in, which keeps parallel runs reproducible.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
    return mix64(master ^ mix64(salt));
}

// Counter-based splitmix64 generator. std::mt19937_64 would do, but the
// standard distributions on top of it are implementation-defined; this
// generator plus the bounded draw below give bit-identical streams on every
// platform, which the seeded-reproducibility contracts rely on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return mix64(state_++); }

    // Unbiased draw from [0, n). Multiply-shift with rejection.
    std::size_t uniform_index(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t bound = n;
        while (true) {
            const std::uint64_t x = next_u64();
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
            const std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= (0ULL - bound) % bound)
                return static_cast<std::size_t>(m >> 64);
        }
    }

private:
    std::uint64_t state_;
};

// Uniform draw of `take` elements without replacement (partial Fisher-Yates),
// returned in the pool's original order.
inline std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool,
                                                           std::size_t take, Rng& rng) {
    take = std::min(take, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace pbda
