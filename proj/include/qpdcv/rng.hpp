#pragma once

#include <cstdint>
#include <string_view>

namespace qpdcv {

// Deterministic hierarchical random streams. A stream is addressed by a
// derivation key built from (master seed, path of labels); generation is
// xoshiro256++ seeded from the key by splitmix64 expansion. Children derive
// from the key alone, never from generator state, so the draw order of a
// parent cannot perturb its children. Every distribution transform is spelled
// out here (no std::*_distribution) to keep output byte-stable across
// standard-library vendors.
class RandomStream {
  public:
    explicit RandomStream(uint64_t master_seed);

    // Derived child stream; label order is significant.
    RandomStream child(std::string_view label) const;
    RandomStream child(uint64_t label) const;

    uint64_t next_u64();
    uint64_t next_below(uint64_t n);  // uniform in [0, n), n >= 1, unbiased
    double next_uniform();            // [0, 1), 53-bit resolution
    double next_gaussian();           // standard normal, Box-Muller (no cache)
    bool next_bernoulli(double p);

    uint64_t key() const { return key_; }

    // UniformRandomBitGenerator
    using result_type = uint64_t;
    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ull; }
    uint64_t operator()() { return next_u64(); }

  private:
    RandomStream(uint64_t derived_key, int);
    uint64_t key_;
    uint64_t s_[4];
};

template <typename... Labels>
RandomStream derive_stream(uint64_t master_seed, Labels... labels) {
    RandomStream s(master_seed);
    ((s = s.child(labels)), ...);
    return s;
}

}  // namespace qpdcv
