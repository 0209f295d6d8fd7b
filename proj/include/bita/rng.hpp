#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace bita::num {

/// Deterministic generator: xoshiro256** seeded via splitmix64.
/// Identical seed gives the identical draw sequence on every platform;
/// distributions are hand-rolled so no standard-library variability leaks in.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0,1) with 53 random bits.
    double uniform01();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n); n must be > 0. Debiased (Lemire).
    std::uint64_t uniform_int(std::uint64_t n);

    /// Standard normal via Box-Muller (both values used, cached).
    double normal();

    /// Fisher-Yates shuffle of indices [0, n).
    std::vector<std::size_t> permutation(std::size_t n);

    std::array<std::uint64_t, 4> state() const { return s_; }
    void set_state(const std::array<std::uint64_t, 4>& s) {
        s_ = s;
        has_cached_normal_ = false;
    }

private:
    std::array<std::uint64_t, 4> s_{};
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace bita::num
