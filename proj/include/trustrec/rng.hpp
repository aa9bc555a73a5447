#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace trustrec {

/// Seeded pseudo-random stream. Substreams are derived from a base seed and
/// a key such as (run, user, item), so a draw sequence depends only on the
/// key and never on which thread or in which order it is consumed.
///
/// Distributions are implemented here rather than with <random> adaptors so
/// that streams are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> key);

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform01();
    /// Uniform in [0, n); n must be positive.
    std::size_t uniform_index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finaliser, used to spread seeds and keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace trustrec
