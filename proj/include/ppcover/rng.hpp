#pragma once

#include <cstdint>
#include <cmath>
#include <array>
#include <stdexcept>

namespace ppcover {

// splitmix64 step; also used as a mixing hash.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x632BE59BD9B4E019ULL + index * 0x9E3779B97F4A7C15ULL);
    return splitmix64(s);
}

// xoshiro256++ stream.  Self-contained so that output is bit-identical on
// every platform; std:: distributions are implementation-defined and are
// deliberately not used anywhere.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    // Deterministic per-index substream: substream(master, i) for trial i.
    static RngStream substream(std::uint64_t master, std::uint64_t index) {
        return RngStream(hash_combine(master, index));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0,1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1]
    double next_double_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_double() < p; }

    // inverse-CDF exponential; keeps the gap sequence reproducible
    double next_exponential(double rate) {
        if (!(rate > 0)) throw std::invalid_argument("exponential rate must be positive");
        return -std::log(next_double_pos()) / rate;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace ppcover
