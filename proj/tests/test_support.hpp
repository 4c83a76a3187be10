#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "udisc/ensemble.hpp"
#include "udisc/ket.hpp"
#include "udisc/rng.hpp"

namespace udisc::testing {

inline double gaussian(SplitMix64& rng) {
    const double u1 = 1.0 - rng.uniform();  // (0, 1]
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Ket random_unit_ket(SplitMix64& rng, Eigen::Index dim) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(gaussian(rng), gaussian(rng));
    return Ket{v}.normalized();
}

/// Strictly positive priors summing to one, each at least 0.05/n.
inline Eigen::VectorXd random_priors(SplitMix64& rng, int n) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = 0.05 + -std::log(1.0 - rng.uniform());
    return p / p.sum();
}

/// Linearly independent states with moderate pairwise overlaps, so the
/// feasible region is neither degenerate nor a near-cube. Rejection sampling
/// on the Gram spectrum keeps reciprocal norms well conditioned.
inline std::vector<Ket> random_moderate_states(SplitMix64& rng, int n, Eigen::Index dim) {
    while (true) {
        std::vector<Ket> states;
        states.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) states.push_back(random_unit_ket(rng, dim));

        bool overlaps_ok = true;
        for (int i = 0; i < n && overlaps_ok; ++i)
            for (int j = i + 1; j < n && overlaps_ok; ++j)
                if (std::abs(inner(states[static_cast<size_t>(i)],
                                   states[static_cast<size_t>(j)])) > 0.85)
                    overlaps_ok = false;
        if (!overlaps_ok) continue;

        const IndependenceReport report = independence_report(states);
        if (report.independent && report.min_gram_eigenvalue > 0.05 * report.max_gram_eigenvalue)
            return states;
    }
}

inline Ket random_qubit(SplitMix64& rng) { return random_unit_ket(rng, 2); }

/// The unique (up to phase) state orthogonal to a qubit state.
inline Ket qubit_perp(const Ket& q) {
    return Ket{{-std::conj(q.amplitudes(1)), std::conj(q.amplitudes(0))}};
}

}  // namespace udisc::testing
