#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace contgrow {

namespace detail {

// SplitMix64 finalizer; used to derive engine seeds and substream ids.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// Seeded, splittable random stream. A stream is identified by (seed,
/// stream_id): the same pair always yields the same draw sequence, and
/// distinct stream_ids give statistically independent sequences. Substreams
/// for replicas, process labels and individuals are derived with fork().
///
/// The generator is xoshiro256++ seeded through SplitMix64; the 32-byte
/// state makes per-individual streams cheap to store. All samplers are
/// implemented by inversion on the raw 64-bit output, so sequences do not
/// depend on standard-library distribution internals.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t z = seed ^ detail::mix64(stream_id);
        for (auto& word : s_) word = z = detail::mix64(z);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Derive a deterministic child stream.
    RandomStream fork(std::uint64_t child) const {
        return RandomStream(seed_, detail::mix64(stream_id_ * 0x9e3779b97f4a7c15ULL + child + 1));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Exponential with the given rate; strictly positive draws.
    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
        double x;
        do {
            x = -std::log1p(-uniform01()) / rate;
        } while (x <= 0.0);
        return x;
    }

    /// Unbiased uniform index in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller (no cached spare; keeps the stream
    /// state a pure function of the call sequence).
    double normal01() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
};

}  // namespace contgrow
