#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "catspread/errors.hpp"

namespace catspread {

/// SplitMix64 finalizer. Bijective on 64-bit words, so distinct inputs give
/// distinct stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a derived stream, identified by a master seed and an index path
/// (for example {salt, k, trial}). Each path element is folded in with one
/// SplitMix64 step, so streams are independent of loop nesting or execution
/// order and reproducible from the documented rule:
///   s0 = master, s_{i+1} = splitmix64(s_i + path_i).
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = master;
    for (std::uint64_t p : path) s = splitmix64(s + p);
    return s;
}

/// Uniform double in the open interval (0, 1): top 53 bits of the engine word,
/// centered so neither endpoint is reachable. Safe to pass to log().
inline double u01_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, bound) by rejection sampling.
inline std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t bound) {
    if (bound == 0) throw ValidationError("bounded_rand: bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % bound;
}

/// Uniform draw from the interior of the probability simplex on k categories:
/// normalized i.i.d. Exp(1) variates. Every coordinate is strictly positive.
inline Eigen::VectorXd random_simplex_point(Eigen::Index k, std::mt19937_64& gen) {
    if (k < 1) throw ValidationError("random_simplex_point: need at least one category");
    Eigen::VectorXd v(k);
    for (Eigen::Index i = 0; i < k; ++i) v[i] = -std::log(u01_open(gen));
    return v / v.sum();
}

}  // namespace catspread
