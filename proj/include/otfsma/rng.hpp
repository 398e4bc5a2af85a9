#pragma once

#include <cstdint>
#include <random>

#include "otfsma/grid.hpp"

namespace otfsma {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes a master seed with stream coordinates into an independent seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

inline Rng make_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return Rng(derive_seed(master, a, b));
}

/// Circularly-symmetric complex Gaussian CN(0, variance).
cplx complex_gaussian(Rng& rng, double variance);

/// Vector of i.i.d. CN(0, variance) samples.
CVector complex_gaussian_vector(Rng& rng, Eigen::Index n, double variance);

}  // namespace otfsma
