#include "igr1d/sticky.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igr1d {

namespace {

struct Block {
  double weight;
  double weighted_sum;
  std::size_t first;
  std::size_t last;  // inclusive
  double value;      // the target itself for a single point, so feasible data come back unchanged

  double mean() const { return value; }
};

std::vector<Block> pool(std::span<const double> targets, std::span<const double> weights) {
  std::vector<Block> stack;
  stack.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    stack.push_back({weights[i], weights[i] * targets[i], i, i, targets[i]});
    while (stack.size() > 1 && stack[stack.size() - 2].mean() > stack.back().mean()) {
      Block top = stack.back();
      stack.pop_back();
      Block& below = stack.back();
      below.weight += top.weight;
      below.weighted_sum += top.weighted_sum;
      below.last = top.last;
      below.value = below.weighted_sum / below.weight;
    }
  }
  return stack;
}

void check_inputs(std::span<const double> targets, std::span<const double> weights) {
  if (targets.size() != weights.size()) throw std::invalid_argument("isotonic_projection: length mismatch");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("isotonic_projection: weights must be positive");
    }
  }
}

void check_velocity(std::span<const double> u0, double t, const Grid& grid) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("sticky: t must be finite and >= 0");
  if (u0.size() != grid.size()) throw std::invalid_argument("sticky: u0 length must be N+1");
  if (u0.front() != 0.0 || u0.back() != 0.0) {
    throw std::invalid_argument("sticky: u0 must vanish at both walls");
  }
}

}  // namespace

std::vector<double> isotonic_projection(std::span<const double> targets, std::span<const double> weights) {
  check_inputs(targets, weights);
  std::vector<double> y(targets.size());
  for (const Block& b : pool(targets, weights)) {
    std::fill(y.begin() + static_cast<std::ptrdiff_t>(b.first),
              y.begin() + static_cast<std::ptrdiff_t>(b.last + 1), b.mean());
  }
  return y;
}

MonotoneMap sticky_solution(std::span<const double> u0, double t, const DiscreteMeasure& mu,
                            const Grid& grid) {
  check_velocity(u0, t, grid);
  const std::size_t n = grid.cells();
  std::vector<double> targets(n - 1);
  for (std::size_t i = 1; i < n; ++i) targets[i - 1] = grid.node(i) + t * u0[i];
  const auto y = isotonic_projection(targets, std::span(mu.node_weight).subspan(1, n - 1));

  MonotoneMap phi;
  phi.values.resize(grid.size());
  phi.values.front() = grid.a();
  phi.values.back() = grid.b();
  for (std::size_t i = 1; i < n; ++i) phi.values[i] = std::clamp(y[i - 1], grid.a(), grid.b());
  return phi;
}

MonotoneMap sticky_solution_mirrored(std::span<const double> u0, double t, const DiscreteMeasure& mu,
                                     const Grid& grid) {
  check_velocity(u0, t, grid);
  const std::size_t n = grid.cells();
  const double a = grid.a();
  const double b = grid.b();
  // Nodes of the reflected copies left of a and right of b (walls excluded from the copies).
  std::vector<double> targets, weights;
  targets.reserve(3 * n + 1);
  weights.reserve(3 * n + 1);
  for (std::size_t i = n; i >= 1; --i) {
    targets.push_back(2.0 * a - (grid.node(i) + t * u0[i]));
    weights.push_back(mu.node_weight[i]);
  }
  for (std::size_t i = 0; i <= n; ++i) {
    targets.push_back(grid.node(i) + t * u0[i]);
    // A wall node collects the lumped mass of both adjacent (original and mirrored) cells.
    weights.push_back((i == 0 || i == n ? 2.0 : 1.0) * mu.node_weight[i]);
  }
  for (std::size_t i = n; i-- > 0;) {
    targets.push_back(2.0 * b - (grid.node(i) + t * u0[i]));
    weights.push_back(mu.node_weight[i]);
  }
  const auto y = isotonic_projection(targets, weights);
  MonotoneMap phi;
  phi.values.assign(y.begin() + static_cast<std::ptrdiff_t>(n),
                    y.begin() + static_cast<std::ptrdiff_t>(2 * n + 1));
  phi.values.front() = a;
  phi.values.back() = b;
  return phi;
}

std::vector<double> sticky_velocity(std::span<const double> u0, double t, const DiscreteMeasure& mu,
                                    const Grid& grid) {
  check_velocity(u0, t, grid);
  const std::size_t n = grid.cells();
  std::vector<double> targets(n - 1);
  for (std::size_t i = 1; i < n; ++i) targets[i - 1] = grid.node(i) + t * u0[i];
  const auto weights = std::span(mu.node_weight).subspan(1, n - 1);

  std::vector<double> v(grid.size(), 0.0);
  for (const Block& blk : pool(targets, weights)) {
    if (blk.mean() <= grid.a() || blk.mean() >= grid.b()) continue;
    double mass = 0.0, momentum = 0.0;
    for (std::size_t j = blk.first; j <= blk.last; ++j) {
      mass += weights[j];
      momentum += weights[j] * u0[j + 1];
    }
    for (std::size_t j = blk.first; j <= blk.last; ++j) v[j + 1] = momentum / mass;
  }
  return v;
}

}  // namespace igr1d
