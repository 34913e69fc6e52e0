#include "igr1d/eulerian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace igr1d {

namespace {

/// Image cell of x: the c with Phi_c <= x <= Phi_{c+1}, clamped to [0, N-1].
std::size_t image_cell(const MonotoneMap& phi, double x) {
  const auto& v = phi.values;
  const auto it = std::upper_bound(v.begin(), v.end(), x);
  const auto idx = static_cast<std::size_t>(std::distance(v.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, v.size() - 2);
}

/// Mass of mu over [a, s].
double cumulative_mass(const DiscreteMeasure& mu, const Grid& grid, const std::vector<double>& prefix, double s) {
  const std::size_t c = grid.locate(s);
  const double h = grid.width(c);
  const double theta = std::clamp((s - grid.node(c)) / h, 0.0, 1.0);
  const double m0 = mu.node_density[c];
  const double m1 = mu.node_density[c + 1];
  return prefix[c] + h * (m0 * theta + 0.5 * (m1 - m0) * theta * theta);
}

/// Lagrange weights (and their derivatives) of the four-node stencil used
/// for label cell c: nodes c-1..c+2, shifted inward at the walls.
struct Stencil {
  std::size_t first = 0;
  std::array<double, 4> w{};
  std::array<double, 4> dw{};

  Stencil(const Grid& grid, std::size_t c, double s) {
    const std::size_t n = grid.cells();
    first = std::min(c > 0 ? c - 1 : 0, n - 3);
    std::array<double, 4> x{};
    for (std::size_t k = 0; k < 4; ++k) x[k] = grid.node(first + k);
    for (std::size_t k = 0; k < 4; ++k) {
      double value = 1.0;
      double denom = 1.0;
      double slope = 0.0;
      for (std::size_t l = 0; l < 4; ++l) {
        if (l == k) continue;
        denom *= x[k] - x[l];
        double term = 1.0;
        for (std::size_t r = 0; r < 4; ++r) {
          if (r != k && r != l) term *= s - x[r];
        }
        slope += term;
        value *= s - x[l];
      }
      w[k] = value / denom;
      dw[k] = slope / denom;
    }
  }

  double value(std::span<const double> f) const {
    double out = 0.0;
    for (std::size_t k = 0; k < 4; ++k) out += w[k] * f[first + k];
    return out;
  }
  double derivative(std::span<const double> f) const {
    double out = 0.0;
    for (std::size_t k = 0; k < 4; ++k) out += dw[k] * f[first + k];
    return out;
  }
};

/// Root of P(s) = x in label cell c for the cubic interpolant P of Phi;
/// safeguarded Newton inside the bracket [node c, node c+1].
double cubic_inverse(const MonotoneMap& phi, const Grid& grid, std::size_t c, double x) {
  double lo = grid.node(c);
  double hi = grid.node(c + 1);
  if (x <= phi.values[c]) return lo;
  if (x >= phi.values[c + 1]) return hi;
  double s = lo + (x - phi.values[c]) / (phi.values[c + 1] - phi.values[c]) * (hi - lo);
  for (int it = 0; it < 100; ++it) {
    const Stencil st(grid, c, s);
    const double r = st.value(phi.values) - x;
    if (r == 0.0) break;
    (r > 0.0 ? hi : lo) = s;
    const double d = st.derivative(phi.values);
    double next = d > 0.0 ? s - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15 * grid.length()) {
      s = next;
      break;
    }
    s = next;
  }
  return s;
}

/// Assembles and solves the lumped P1 screened problem on nodes x with
/// per-node lumped mass coefficients, per-cell stiffness coefficients and
/// per-node loads (already integrated).
std::vector<double> screened_solve(std::span<const double> lumped_mass, std::span<const double> stiffness,
                                   std::span<const double> load) {
  TridiagonalSystem sys;
  sys.diag.assign(lumped_mass.begin(), lumped_mass.end());
  sys.off.assign(stiffness.size(), 0.0);
  sys.rhs.assign(load.begin(), load.end());
  for (std::size_t c = 0; c < stiffness.size(); ++c) {
    sys.diag[c] += stiffness[c];
    sys.diag[c + 1] += stiffness[c];
    sys.off[c] = -stiffness[c];
  }
  return solve_tridiagonal_spd(sys);
}

}  // namespace

double inverse_map(const MonotoneMap& phi, const Grid& grid, double x) {
  const std::size_t c = image_cell(phi, x);
  const double dphi = phi.values[c + 1] - phi.values[c];
  const double theta = std::clamp((x - phi.values[c]) / dphi, 0.0, 1.0);
  return grid.node(c) + theta * grid.width(c);
}

EulerianState to_eulerian(const LagrangianFrame& frame, const DiscreteMeasure& mu, const Grid& grid,
                          const Grid& eulerian_grid, Reconstruction reconstruction) {
  const auto& phi = frame.phi;
  if (!phi.strictly_increasing(grid)) throw std::invalid_argument("to_eulerian: map is not strictly increasing");
  if (eulerian_grid.a() != grid.a() || eulerian_grid.b() != grid.b()) {
    throw std::invalid_argument("to_eulerian: Eulerian grid must cover [a, b]");
  }
  const bool cubic = reconstruction == Reconstruction::cubic && grid.cells() >= 3;

  const auto slopes = cell_derivative(grid, phi.values);
  std::vector<double> prefix(grid.size(), 0.0);
  for (std::size_t c = 0; c < grid.cells(); ++c) prefix[c + 1] = prefix[c] + mu.cell_mass[c];

  EulerianState state;
  state.t = frame.t;
  const std::size_t m = eulerian_grid.size();
  state.x.assign(eulerian_grid.nodes().begin(), eulerian_grid.nodes().end());
  state.u.resize(m);
  state.rho.resize(m);
  std::vector<double> labels(m);

  for (std::size_t j = 0; j < m; ++j) {
    const double x = state.x[j];
    const std::size_t c = image_cell(phi, x);
    const double dphi = phi.values[c + 1] - phi.values[c];
    const double theta = std::clamp((x - phi.values[c]) / dphi, 0.0, 1.0);
    const double s_lin = grid.node(c) + theta * grid.width(c);
    const double density = (1.0 - theta) * mu.node_density[c] + theta * mu.node_density[c + 1];

    if (cubic) {
      const double s = cubic_inverse(phi, grid, c, x);
      const Stencil st(grid, c, s);
      const double slope = st.derivative(phi.values);
      labels[j] = s;
      state.u[j] = st.value(frame.phi_dot);
      state.rho[j] = slope > 0.0 ? st.value(mu.node_density) / slope : density / slopes[c];
      continue;
    }

    labels[j] = s_lin;
    state.u[j] = (1.0 - theta) * frame.phi_dot[c] + theta * frame.phi_dot[c + 1];
    if (x == phi.values[c] && c > 0) {
      state.rho[j] = 0.5 * (density / slopes[c - 1] + density / slopes[c]);
    } else if (x == phi.values[c + 1] && c + 1 < grid.cells()) {
      state.rho[j] = 0.5 * (density / slopes[c] + density / slopes[c + 1]);
    } else {
      state.rho[j] = density / slopes[c];
    }
  }
  state.u.front() = 0.0;
  state.u.back() = 0.0;

  // Exact pushforward mass: mu mass of the label preimage of each Eulerian cell.
  state.cell_mass.resize(eulerian_grid.cells());
  double previous = 0.0;
  for (std::size_t j = 0; j < eulerian_grid.cells(); ++j) {
    const double next = j + 2 == m ? prefix.back() : cumulative_mass(mu, grid, prefix, labels[j + 1]);
    state.cell_mass[j] = next - previous;
    previous = next;
  }
  return state;
}

std::vector<double> solve_screened_neumann(const Grid& x, std::span<const double> rho,
                                           std::span<const double> source, double alpha) {
  const std::size_t m = x.size();
  if (rho.size() != m || source.size() != m) throw std::invalid_argument("solve_screened_neumann: length mismatch");
  if (!(alpha >= 0.0)) throw std::invalid_argument("solve_screened_neumann: alpha must be nonnegative");
  for (double r : rho) {
    if (!(r > 0.0)) throw std::invalid_argument("solve_screened_neumann: density must be positive");
  }
  std::vector<double> mass(m, 0.0);
  std::vector<double> load(m, 0.0);
  std::vector<double> stiffness(m - 1);
  for (std::size_t c = 0; c + 1 < m; ++c) {
    const double h = x.width(c);
    stiffness[c] = alpha * 0.5 * (1.0 / rho[c] + 1.0 / rho[c + 1]) / h;
    mass[c] += 0.5 * h / rho[c];
    mass[c + 1] += 0.5 * h / rho[c + 1];
    load[c] += 0.5 * h * source[c];
    load[c + 1] += 0.5 * h * source[c + 1];
  }
  return screened_solve(mass, stiffness, load);
}

EulerianState entropic_pressure(EulerianState state, const IgrParams& params) {
  const Grid x(state.x);
  const std::size_t m = x.size();
  // Per-cell source 2 alpha (du/dx)^2, half of each cell integral to each end,
  // divided by the node's lumped length.
  std::vector<double> load(m, 0.0);
  std::vector<double> length(m, 0.0);
  for (std::size_t c = 0; c + 1 < m; ++c) {
    const double h = x.width(c);
    const double du = (state.u[c + 1] - state.u[c]) / h;
    const double cell = 2.0 * params.alpha * du * du * h;
    load[c] += 0.5 * cell;
    load[c + 1] += 0.5 * cell;
    length[c] += 0.5 * h;
    length[c + 1] += 0.5 * h;
  }
  for (std::size_t j = 0; j < m; ++j) load[j] /= length[j];
  state.sigma = solve_screened_neumann(x, state.rho, load, params.alpha);
  return state;
}

std::vector<double> image_pressure(const LagrangianFrame& frame, const DiscreteMeasure& mu, const Grid& grid,
                                   const IgrParams& params) {
  const std::size_t n = grid.cells();
  std::vector<double> mass(n + 1, 0.0);
  std::vector<double> load(n + 1, 0.0);
  std::vector<double> stiffness(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double dphi = frame.phi.values[c + 1] - frame.phi.values[c];
    if (!(dphi > 0.0)) throw std::invalid_argument("image_pressure: map is not strictly increasing");
    const double dvel = frame.phi_dot[c + 1] - frame.phi_dot[c];
    const double m = mu.cell_mass[c];
    // Image cell of width dphi with density m / dphi.
    stiffness[c] = params.alpha / m;
    mass[c] += 0.5 * dphi * dphi / m;
    mass[c + 1] += 0.5 * dphi * dphi / m;
    const double source = 2.0 * params.alpha * dvel * dvel / dphi;
    load[c] += 0.5 * source;
    load[c + 1] += 0.5 * source;
  }
  return screened_solve(mass, stiffness, load);
}

double total_mass(const EulerianState& state) {
  return std::accumulate(state.cell_mass.begin(), state.cell_mass.end(), 0.0);
}

double total_momentum(const LagrangianFrame& frame, const DiscreteMeasure& mu, const Grid& grid) {
  double total = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const double m0 = mu.node_density[c];
    const double m1 = mu.node_density[c + 1];
    const double v0 = frame.phi_dot[c];
    const double v1 = frame.phi_dot[c + 1];
    total += grid.width(c) * (2.0 * m0 * v0 + m0 * v1 + m1 * v0 + 2.0 * m1 * v1) / 6.0;
  }
  return total;
}

std::vector<ConservationRow> conservation_report(const TimeSeries& series, const DiscreteMeasure& mu,
                                                 const Grid& grid, const Grid& eulerian_grid,
                                                 const IgrParams& params) {
  if (series.frames.empty()) throw std::invalid_argument("conservation_report: empty series");
  std::vector<ConservationRow> rows;
  rows.reserve(series.frames.size());
  for (const auto& frame : series.frames) {
    const auto state = to_eulerian(frame, mu, grid, eulerian_grid);
    const auto sigma = image_pressure(frame, mu, grid, params);
    ConservationRow row;
    row.t = frame.t;
    row.mass = total_mass(state);
    row.mass_drift = row.mass - 1.0;
    row.momentum = total_momentum(frame, mu, grid);
    row.sigma_a = sigma.front();
    row.sigma_b = sigma.back();
    rows.push_back(row);
  }
  for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
    const double dt = rows[k + 1].t - rows[k - 1].t;
    const double rate = (rows[k + 1].momentum - rows[k - 1].momentum) / dt;
    rows[k].budget_residual = std::abs(rate + rows[k].sigma_b - rows[k].sigma_a);
  }
  return rows;
}

EulerianResidual eulerian_residual(std::span<const LagrangianFrame> frames, const DiscreteMeasure& mu,
                                   const Grid& grid, const Grid& eulerian_grid, const IgrParams& params) {
  if (frames.size() != 3) throw std::invalid_argument("eulerian_residual: needs three frames");
  const double before = frames[1].t - frames[0].t;
  const double after = frames[2].t - frames[1].t;
  if (!(before > 0.0) || std::abs(after - before) > 1e-9 * before) {
    throw std::invalid_argument("eulerian_residual: frames must be equally spaced in t");
  }
  const double dt = 0.5 * (after + before);
  const auto cubic = Reconstruction::cubic;
  const auto prev = to_eulerian(frames[0], mu, grid, eulerian_grid, cubic);
  const auto mid = to_eulerian(frames[1], mu, grid, eulerian_grid, cubic);
  const auto next = to_eulerian(frames[2], mu, grid, eulerian_grid, cubic);

  // Pressure from the interpolation-free image solve, carried to the
  // Eulerian nodes with the same cubic reconstruction.
  const auto sigma_nodes = image_pressure(frames[1], mu, grid, params);
  std::vector<double> sigma(mid.x.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const double x = mid.x[j];
    const std::size_t c = image_cell(frames[1].phi, x);
    if (grid.cells() >= 3) {
      sigma[j] = Stencil(grid, c, cubic_inverse(frames[1].phi, grid, c, x)).value(sigma_nodes);
    } else {
      const double s = inverse_map(frames[1].phi, grid, x);
      const double theta = (s - grid.node(c)) / grid.width(c);
      sigma[j] = (1.0 - theta) * sigma_nodes[c] + theta * sigma_nodes[c + 1];
    }
  }

  EulerianResidual r;
  for (std::size_t j = 1; j + 1 < mid.x.size(); ++j) {
    const double dx = mid.x[j + 1] - mid.x[j - 1];
    const double drho_dt = (next.rho[j] - prev.rho[j]) / (2.0 * dt);
    const double dmom_dt = (next.rho[j] * next.u[j] - prev.rho[j] * prev.u[j]) / (2.0 * dt);
    auto momentum = [&](std::size_t i) { return mid.rho[i] * mid.u[i]; };
    auto flux = [&](std::size_t i) { return mid.rho[i] * mid.u[i] * mid.u[i] + sigma[i]; };
    r.mass = std::max(r.mass, std::abs(drho_dt + (momentum(j + 1) - momentum(j - 1)) / dx));
    r.momentum = std::max(r.momentum, std::abs(dmom_dt + (flux(j + 1) - flux(j - 1)) / dx));
  }
  return r;
}

}  // namespace igr1d
