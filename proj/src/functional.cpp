#include "igr1d/functional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace igr1d {

MonotoneMap MonotoneMap::identity(const Grid& grid) {
  return MonotoneMap{std::vector<double>(grid.nodes().begin(), grid.nodes().end())};
}

bool MonotoneMap::strictly_increasing(const Grid& grid) const {
  if (values.size() != grid.size()) return false;
  if (values.front() != grid.a() || values.back() != grid.b()) return false;
  for (std::size_t c = 0; c + 1 < values.size(); ++c) {
    if (!(values[c + 1] > values[c])) return false;
  }
  return true;
}

bool MonotoneMap::nondecreasing(const Grid& grid) const {
  if (values.size() != grid.size()) return false;
  if (values.front() != grid.a() || values.back() != grid.b()) return false;
  for (std::size_t c = 0; c + 1 < values.size(); ++c) {
    if (!(values[c + 1] >= values[c])) return false;
  }
  return true;
}

const char* to_string(DataMode mode) {
  return mode == DataMode::raw ? "raw" : "regularized";
}

DataMode data_mode_from_string(const std::string& name) {
  if (name == "raw") return DataMode::raw;
  if (name == "regularized") return DataMode::regularized;
  throw std::invalid_argument("unknown data mode: " + name);
}

LinearData make_raw_data(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("make_raw_data: non-finite entry");
  }
  return LinearData{std::vector<double>(v.begin(), v.end()), {}, DataMode::raw};
}

LinearData make_regularized_data(std::span<const double> u0, const Grid& grid) {
  if (u0.size() != grid.size()) throw std::invalid_argument("make_regularized_data: length mismatch");
  if (u0.front() != 0.0 || u0.back() != 0.0) {
    throw std::invalid_argument("make_regularized_data: u0 must vanish at both walls");
  }
  for (double x : u0) {
    if (!std::isfinite(x)) throw std::invalid_argument("make_regularized_data: non-finite entry");
  }
  return LinearData{std::vector<double>(u0.begin(), u0.end()), cell_derivative(grid, u0),
                    DataMode::regularized};
}

void validate(const IgrParams& params) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    throw std::invalid_argument("alpha must be positive");
  }
  if (!(params.newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (params.max_iter <= 0) throw std::invalid_argument("max_iter must be positive");
}

namespace {

void check_sizes(const LinearData& data, const Grid& grid) {
  if (data.node_values.size() != grid.size()) {
    throw std::invalid_argument("linear data length must be N+1");
  }
  if (data.mode == DataMode::regularized && data.cell_slopes.size() != grid.cells()) {
    throw std::invalid_argument("regularized data needs one slope per cell");
  }
}

// Cell increments dPhi_c; returns false if any is <= 0.
bool increments(std::span<const double> phi, std::vector<double>& out) {
  out.resize(phi.size() - 1);
  bool ok = true;
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = phi[c + 1] - phi[c];
    if (!(out[c] > 0.0)) ok = false;
  }
  return ok;
}

}  // namespace

std::vector<double> nodal_forcing(const LinearData& data, double alpha, const DiscreteMeasure& mu,
                                  const Grid& grid) {
  check_sizes(data, grid);
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = mu.node_weight[i] * data.node_values[i];
  if (data.mode == DataMode::regularized && alpha != 0.0) {
    // alpha sum_c m_c (dPhi_c / h_c) du0_c, distributed onto the two nodes of each cell.
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      const double flux = alpha * mu.cell_mass[c] * data.cell_slopes[c] / grid.width(c);
      g[c] -= flux;
      g[c + 1] += flux;
    }
  }
  return g;
}

double data_action(const LinearData& data, std::span<const double> phi, double alpha,
                   const DiscreteMeasure& mu, const Grid& grid) {
  const auto g = nodal_forcing(data, alpha, mu, grid);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * phi[i];
  return s;
}

std::vector<double> effective_velocity(const LinearData& data, double alpha, const DiscreteMeasure& mu,
                                       const Grid& grid) {
  auto g = nodal_forcing(data, alpha, mu, grid);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= mu.node_weight[i];
  return g;
}

std::optional<double> objective_hat(const MonotoneMap& phi, const LinearData& data, double t,
                                    const IgrParams& params, const DiscreteMeasure& mu, const Grid& grid) {
  check_sizes(data, grid);
  std::vector<double> dphi;
  if (phi.values.size() != grid.size() || !increments(phi.values, dphi)) return std::nullopt;

  double barrier = 0.0;
  for (std::size_t c = 0; c < dphi.size(); ++c) {
    barrier -= mu.cell_mass[c] * std::log(dphi[c] / grid.width(c));
  }
  double quadratic = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = phi.values[i] - grid.node(i);
    quadratic += 0.5 * mu.node_weight[i] * d * d;
  }
  return quadratic + params.alpha * barrier - t * data_action(data, phi.values, params.alpha, mu, grid);
}

double objective_nominal(std::span<const double> phi, const LinearData& data, double t,
                         const DiscreteMeasure& mu, const Grid& grid) {
  check_sizes(data, grid);
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double d = phi[i] - grid.node(i);
    s += mu.node_weight[i] * (0.5 * d * d - t * data.node_values[i] * phi[i]);
  }
  return s;
}

std::vector<double> gradient(const MonotoneMap& phi, const LinearData& data, double t,
                             const IgrParams& params, const DiscreteMeasure& mu, const Grid& grid) {
  check_sizes(data, grid);
  std::vector<double> dphi;
  if (phi.values.size() != grid.size() || !increments(phi.values, dphi)) {
    throw std::domain_error("gradient: map is not strictly increasing");
  }
  const auto g = nodal_forcing(data, params.alpha, mu, grid);
  const std::size_t n = grid.cells();
  std::vector<double> grad(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double flux_left = params.alpha * mu.cell_mass[i - 1] / dphi[i - 1];
    const double flux_right = params.alpha * mu.cell_mass[i] / dphi[i];
    grad[i - 1] = mu.node_weight[i] * (phi.values[i] - grid.node(i)) - flux_left + flux_right - t * g[i];
  }
  return grad;
}

TridiagonalSystem hessian(const MonotoneMap& phi, const IgrParams& params, const DiscreteMeasure& mu,
                          const Grid& grid) {
  std::vector<double> dphi;
  if (phi.values.size() != grid.size() || !increments(phi.values, dphi)) {
    throw std::domain_error("hessian: map is not strictly increasing");
  }
  const std::size_t n = grid.cells();
  std::vector<double> k(n);
  for (std::size_t c = 0; c < n; ++c) k[c] = params.alpha * mu.cell_mass[c] / (dphi[c] * dphi[c]);

  TridiagonalSystem h;
  h.diag.resize(n - 1);
  h.off.resize(n - 2);
  h.rhs.assign(n - 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    h.diag[i - 1] = mu.node_weight[i] + k[i - 1] + k[i];
    if (i + 1 < n) h.off[i - 1] = -k[i];
  }
  return h;
}

std::optional<double> kl_pushforward(const MonotoneMap& phi, const DiscreteMeasure& mu, const Grid& grid) {
  if (phi.values.size() != grid.size()) throw std::invalid_argument("kl_pushforward: length mismatch");

  // Exact integral of the interpolated density over [lo, hi].
  auto reference_mass = [&](double lo, double hi) {
    double total = 0.0;
    std::size_t c = grid.locate(lo);
    while (c < grid.cells() && grid.node(c) < hi) {
      const double s0 = std::max(lo, grid.node(c));
      const double s1 = std::min(hi, grid.node(c + 1));
      if (s1 > s0) total += 0.5 * (s1 - s0) * (mu.density_at(grid, s0) + mu.density_at(grid, s1));
      ++c;
    }
    return total;
  };

  double kl = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const double lo = phi.values[c];
    const double hi = phi.values[c + 1];
    const double m = mu.cell_mass[c];
    if (!(hi > lo)) {
      if (m > 0.0) return std::nullopt;
      continue;
    }
    kl += m * std::log(m / reference_mass(lo, hi));
  }
  return kl;
}

std::optional<double> log_barrier(const MonotoneMap& phi, const DiscreteMeasure& mu, const Grid& grid) {
  std::vector<double> dphi;
  if (phi.values.size() != grid.size() || !increments(phi.values, dphi)) return std::nullopt;
  double s = 0.0;
  for (std::size_t c = 0; c < dphi.size(); ++c) s -= mu.cell_mass[c] * std::log(dphi[c] / grid.width(c));
  return s;
}

}  // namespace igr1d
