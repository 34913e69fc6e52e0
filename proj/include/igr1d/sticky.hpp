#pragma once

#include <span>
#include <vector>

#include "igr1d/functional.hpp"
#include "igr1d/numerics.hpp"

namespace igr1d {

/// Weighted isotonic regression by pool-adjacent-violators, O(M).
/// Returns the minimizer of sum_i w_i (y_i - targets_i)^2 over nondecreasing y.
std::vector<double> isotonic_projection(std::span<const double> targets, std::span<const double> weights);

/// Sticky-particle map: the L2(mu) projection of Id + t u0 onto monotone maps
/// of [a, b] with pinned endpoints. Interior nodes are pooled, then clamped to
/// [a, b]; clamping an isotonic fit gives the bounded isotonic fit.
MonotoneMap sticky_solution(std::span<const double> u0, double t, const DiscreteMeasure& mu,
                            const Grid& grid);

/// Same projection computed by reflecting the data oddly about both walls and
/// pooling on the tripled domain without any clamping.
MonotoneMap sticky_solution_mirrored(std::span<const double> u0, double t, const DiscreteMeasure& mu,
                                     const Grid& grid);

/// Lagrangian velocity of the sticky flow: the mu-weighted mean of u0 over
/// each pooled block, zero on blocks stuck at a wall.
std::vector<double> sticky_velocity(std::span<const double> u0, double t, const DiscreteMeasure& mu,
                                    const Grid& grid);

}  // namespace igr1d
