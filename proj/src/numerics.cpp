#include "igr1d/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace igr1d {

Grid::Grid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) {
    throw std::invalid_argument("grid needs at least 2 cells");
  }
  widths_.resize(nodes_.size() - 1);
  for (std::size_t c = 0; c < widths_.size(); ++c) {
    if (!std::isfinite(nodes_[c]) || !std::isfinite(nodes_[c + 1]) || !(nodes_[c + 1] > nodes_[c])) {
      throw std::invalid_argument("grid nodes must be finite and strictly increasing");
    }
    widths_[c] = nodes_[c + 1] - nodes_[c];
  }
}

std::size_t Grid::locate(double x) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  if (it == nodes_.begin()) return 0;
  std::size_t c = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::min(c, cells() - 1);
}

Grid make_uniform_grid(double a, double b, std::size_t cells) {
  if (!(a < b)) throw std::invalid_argument("make_uniform_grid: need a < b");
  if (cells < 2) throw std::invalid_argument("make_uniform_grid: need N >= 2");
  std::vector<double> nodes(cells + 1);
  const double h = (b - a) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) nodes[i] = a + h * static_cast<double>(i);
  nodes.back() = b;
  return Grid(std::move(nodes));
}

double DiscreteMeasure::density_at(const Grid& grid, double x) const {
  const std::size_t c = grid.locate(x);
  const double theta = std::clamp((x - grid.node(c)) / grid.width(c), 0.0, 1.0);
  return (1.0 - theta) * node_density[c] + theta * node_density[c + 1];
}

DiscreteMeasure measure_from_density(const Grid& grid, std::span<const double> density_at_nodes) {
  if (density_at_nodes.size() != grid.size()) {
    throw std::invalid_argument("measure_from_density: density length must be N+1");
  }
  for (double d : density_at_nodes) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("measure_from_density: density must be positive and finite");
    }
  }
  DiscreteMeasure mu;
  mu.node_density.assign(density_at_nodes.begin(), density_at_nodes.end());
  mu.cell_mass.resize(grid.cells());
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    mu.cell_mass[c] = 0.5 * grid.width(c) * (mu.node_density[c] + mu.node_density[c + 1]);
  }
  const double total = std::accumulate(mu.cell_mass.begin(), mu.cell_mass.end(), 0.0);
  for (double& d : mu.node_density) d /= total;
  for (double& m : mu.cell_mass) m /= total;

  mu.node_weight.assign(grid.size(), 0.0);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    mu.node_weight[c] += 0.5 * mu.cell_mass[c];
    mu.node_weight[c + 1] += 0.5 * mu.cell_mass[c];
  }
  return mu;
}

DiscreteMeasure uniform_measure(const Grid& grid) {
  std::vector<double> ones(grid.size(), 1.0);
  return measure_from_density(grid, ones);
}

std::vector<double> cell_derivative(const Grid& grid, std::span<const double> node_values) {
  if (node_values.size() != grid.size()) {
    throw std::invalid_argument("cell_derivative: length mismatch");
  }
  std::vector<double> d(grid.cells());
  for (std::size_t c = 0; c < d.size(); ++c) {
    d[c] = (node_values[c + 1] - node_values[c]) / grid.width(c);
  }
  return d;
}

double integrate(const DiscreteMeasure& mu, std::span<const double> node_values) {
  if (node_values.size() != mu.node_weight.size()) {
    throw std::invalid_argument("integrate: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < node_values.size(); ++i) s += mu.node_weight[i] * node_values[i];
  return s;
}

double l2_norm(const DiscreteMeasure& mu, std::span<const double> node_values) {
  if (node_values.size() != mu.node_weight.size()) {
    throw std::invalid_argument("l2_norm: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < node_values.size(); ++i) {
    s += mu.node_weight[i] * node_values[i] * node_values[i];
  }
  return std::sqrt(s);
}

double l2_distance(const DiscreteMeasure& mu, std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size() || f.size() != mu.node_weight.size()) {
    throw std::invalid_argument("l2_distance: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    s += mu.node_weight[i] * d * d;
  }
  return std::sqrt(s);
}

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw std::invalid_argument("sup_distance: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

std::vector<double> TridiagonalSystem::apply(std::span<const double> x) const {
  const std::size_t m = size();
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += off[i - 1] * x[i - 1];
    if (i + 1 < m) s += off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<double> solve_tridiagonal_spd(const TridiagonalSystem& sys) {
  const std::size_t m = sys.size();
  if (sys.rhs.size() != m || (m > 0 && sys.off.size() != m - 1)) {
    throw std::invalid_argument("solve_tridiagonal_spd: inconsistent sizes");
  }
  if (m == 0) return {};

  // A = L D L^T with unit lower bidiagonal L.
  std::vector<double> d(m), l(m > 1 ? m - 1 : 0), x(m);
  d[0] = sys.diag[0];
  if (!(d[0] > 0.0)) throw NumericalError("solve_tridiagonal_spd: nonpositive pivot at row 0");
  x[0] = sys.rhs[0];
  for (std::size_t i = 1; i < m; ++i) {
    l[i - 1] = sys.off[i - 1] / d[i - 1];
    d[i] = sys.diag[i] - l[i - 1] * sys.off[i - 1];
    if (!(d[i] > 0.0)) {
      throw NumericalError("solve_tridiagonal_spd: nonpositive pivot at row " + std::to_string(i));
    }
    x[i] = sys.rhs[i] - l[i - 1] * x[i - 1];
  }
  x[m - 1] /= d[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    x[i] = x[i] / d[i] - l[i] * x[i + 1];
  }
  return x;
}

}  // namespace igr1d
