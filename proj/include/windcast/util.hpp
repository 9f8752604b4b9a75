#ifndef WINDCAST_UTIL_HPP
#define WINDCAST_UTIL_HPP

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace windcast {

// splitmix64: used to derive independent per-worker streams from one seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = seed ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

// Self-contained xoshiro256** generator. The standard <random> distributions
// are not pinned across library implementations, so anything that must be
// reproducible draws through this engine and the helpers below.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, n) without modulo bias.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Marsaglia polar method; one value per call, spare discarded for
    // stream simplicity.
    double normal(double mean = 0.0, double sd = 1.0);

private:
    std::uint64_t state_[4];
};

// Runs fn(i) for i in [0, n) across at most `workers` threads. Callers write
// results into per-index slots, so the output is identical for any worker
// count. workers <= 1 runs inline.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

unsigned default_workers();

}  // namespace windcast

#endif
