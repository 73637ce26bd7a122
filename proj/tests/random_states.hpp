#pragma once

#include <cmath>
#include <random>

#include "fracsearch/quantum_walk.hpp"

namespace testing_support {

/// Unit-norm state with Gaussian real and imaginary parts.
inline fracsearch::WalkState random_unit_state(const fracsearch::CarpetLattice& lattice,
                                               std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    fracsearch::WalkState state(lattice);
    double norm2 = 0.0;
    for (auto& a : state.amplitudes()) {
        a = {gauss(rng), gauss(rng)};
        norm2 += std::norm(a);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : state.amplitudes()) a *= scale;
    return state;
}

inline double max_abs_diff(const fracsearch::WalkState& a, const fracsearch::WalkState& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        worst = std::max(worst, std::abs(a.amplitudes()[k] - b.amplitudes()[k]));
    return worst;
}

} // namespace testing_support
