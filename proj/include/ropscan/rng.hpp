#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace ropscan {

// xoshiro256++ generator. Used everywhere randomness is needed so runs are
// reproducible from a single u64 seed and the full state fits in four words
// (it has to round-trip through the model file for training resume).
class Rng {
public:
    Rng() : Rng(0) {}

    explicit Rng(uint64_t seed) {
        // splitmix64 expansion of the seed into the initial state
        uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    uint32_t next_u32() { return static_cast<uint32_t>(next_u64() >> 32); }

    // Uniform in [0, 1). 53 mantissa bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    uint64_t below(uint64_t n) { return next_u64() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller, no cached second value (stateless
    // beyond the generator words, which keeps serialization exact).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename Vec>
    void shuffle(Vec& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derive an independent stream, e.g. per grid cell or per repeat.
    Rng fork(uint64_t stream) {
        Rng child;
        child.state_[0] = next_u64() ^ (stream * 0x9e3779b97f4a7c15ULL);
        child.state_[1] = next_u64() ^ rotl(stream, 21);
        child.state_[2] = next_u64() + stream;
        child.state_[3] = next_u64() ^ rotl(stream, 43);
        // avoid the all-zero state
        if ((child.state_[0] | child.state_[1] | child.state_[2] | child.state_[3]) == 0)
            child.state_[0] = 1;
        return child;
    }

    std::array<uint64_t, 4> state() const { return state_; }
    void set_state(const std::array<uint64_t, 4>& s) { state_ = s; }

    std::string state_hex() const;
    static Rng from_state_hex(const std::string& hex);

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<uint64_t, 4> state_{};
};

inline std::string Rng::state_hex() const {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(4 * 16 + 3);
    for (size_t w = 0; w < 4; ++w) {
        if (w) out.push_back(':');
        for (int shift = 60; shift >= 0; shift -= 4)
            out.push_back(digits[(state_[w] >> shift) & 0xf]);
    }
    return out;
}

inline Rng Rng::from_state_hex(const std::string& hex) {
    Rng r;
    std::array<uint64_t, 4> s{};
    size_t word = 0;
    uint64_t acc = 0;
    int nibbles = 0;
    for (char c : hex) {
        if (c == ':') {
            if (word < 4) s[word++] = acc;
            acc = 0;
            nibbles = 0;
            continue;
        }
        uint64_t v;
        if (c >= '0' && c <= '9') v = static_cast<uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v = static_cast<uint64_t>(c - 'a' + 10);
        else continue;
        acc = (acc << 4) | v;
        ++nibbles;
    }
    if (word < 4 && nibbles > 0) s[word++] = acc;
    r.set_state(s);
    return r;
}

} // namespace ropscan
