#pragma once

#include "pidchan/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Flat Dirichlet draw; entries are zeroed with probability `zero_fraction`.
inline std::vector<double> random_simplex(Rng& rng, std::size_t n, double zero_fraction = 0.0) {
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = uniform01(rng) < zero_fraction ? 0.0 : -std::log(1.0 - uniform01(rng));
        total += x;
    }
    if (total == 0.0) {
        v[0] = 1.0;
        total = 1.0;
    }
    for (double& x : v) x /= total;
    return v;
}

inline pidchan::Dist random_dist(Rng& rng, std::size_t n, double zero_fraction = 0.0) {
    return pidchan::Dist(random_simplex(rng, n, zero_fraction));
}

inline pidchan::Channel random_channel(Rng& rng, std::size_t rows, std::size_t cols, double zero_fraction = 0.0) {
    std::vector<std::vector<double>> m;
    for (std::size_t r = 0; r < rows; ++r) m.push_back(random_simplex(rng, cols, zero_fraction));
    return pidchan::Channel::from_rows(m);
}

}  // namespace testing
