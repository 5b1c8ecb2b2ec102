#include "qpdcv/rng.hpp"

#include <cmath>
#include <numbers>

namespace qpdcv {

namespace {

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline uint64_t splitmix_next(uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    return mix64(s);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr uint64_t kStrTag = 0x7374726c6162656cull;  // distinguishes label kinds
constexpr uint64_t kIntTag = 0x696e746c6162656cull;

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

RandomStream::RandomStream(uint64_t master_seed) : RandomStream(mix64(master_seed ^ kIntTag), 0) {}

RandomStream::RandomStream(uint64_t derived_key, int) : key_(derived_key) {
    uint64_t s = key_;
    for (auto& w : s_) w = splitmix_next(s);
    // all-zero state would be a fixed point of xoshiro
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

RandomStream RandomStream::child(std::string_view label) const {
    return RandomStream(mix64(key_ ^ mix64(fnv1a64(label) ^ kStrTag)), 0);
}

RandomStream RandomStream::child(uint64_t label) const {
    return RandomStream(mix64(key_ ^ mix64(label ^ kIntTag)), 0);
}

uint64_t RandomStream::next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

uint64_t RandomStream::next_below(uint64_t n) {
    // rejection keeps this exactly uniform
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
        uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double RandomStream::next_uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

double RandomStream::next_gaussian() {
    // u1 in (0,1] keeps the log finite; second Box-Muller value dropped so
    // draw count per call is fixed.
    double u1 = 1.0 - next_uniform();
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool RandomStream::next_bernoulli(double p) { return next_uniform() < p; }

}  // namespace qpdcv
