#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace igr1d {

/// Raised when an iterative or direct solve cannot produce a valid result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Node partition of [a, b]. Nodes are strictly increasing and immutable.
class Grid {
 public:
  explicit Grid(std::vector<double> nodes);

  double a() const { return nodes_.front(); }
  double b() const { return nodes_.back(); }
  double length() const { return b() - a(); }

  /// Number of cells N; there are N + 1 nodes.
  std::size_t cells() const { return widths_.size(); }
  std::size_t size() const { return nodes_.size(); }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> widths() const { return widths_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double width(std::size_t c) const { return widths_[c]; }

  /// Index c of the cell containing x (clamped to [0, N-1]).
  std::size_t locate(double x) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> widths_;
};

Grid make_uniform_grid(double a, double b, std::size_t cells);

/// Initial mass distribution, normalized to total mass 1.
///
/// The density is treated as piecewise linear between nodes, so the
/// trapezoid cell masses are exact integrals of that interpolant.
struct DiscreteMeasure {
  std::vector<double> node_density;  // mass per unit length at nodes
  std::vector<double> cell_mass;     // exact mass of each cell
  std::vector<double> node_weight;   // lumped mass: half of each adjacent cell

  /// Density of the piecewise-linear interpolant at label position x.
  double density_at(const Grid& grid, double x) const;
};

DiscreteMeasure measure_from_density(const Grid& grid, std::span<const double> density_at_nodes);
DiscreteMeasure uniform_measure(const Grid& grid);

/// Per-cell slope (v[c+1] - v[c]) / h_c of a nodal function.
std::vector<double> cell_derivative(const Grid& grid, std::span<const double> node_values);

/// Lumped quadrature: sum_i w_i mu_i f_i.
double integrate(const DiscreteMeasure& mu, std::span<const double> node_values);

/// sqrt of the lumped quadrature of f^2 (the discrete L2(mu) norm).
double l2_norm(const DiscreteMeasure& mu, std::span<const double> node_values);

/// Lumped L2(mu) distance between two nodal functions.
double l2_distance(const DiscreteMeasure& mu, std::span<const double> f, std::span<const double> g);

double sup_norm(std::span<const double> values);
double sup_distance(std::span<const double> f, std::span<const double> g);

/// Symmetric tridiagonal system; off[i] couples unknowns i and i+1.
struct TridiagonalSystem {
  std::vector<double> diag;
  std::vector<double> off;
  std::vector<double> rhs;

  std::size_t size() const { return diag.size(); }

  /// y = A x (matrix part only).
  std::vector<double> apply(std::span<const double> x) const;
};

/// LDL^T elimination in O(M). Throws NumericalError on a nonpositive pivot.
std::vector<double> solve_tridiagonal_spd(const TridiagonalSystem& sys);

}  // namespace igr1d
