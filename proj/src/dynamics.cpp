#include "igr1d/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace igr1d {

namespace {

// Interior solution padded with the homogeneous wall values.
std::vector<double> with_walls(const std::vector<double>& interior) {
  std::vector<double> out(interior.size() + 2, 0.0);
  std::copy(interior.begin(), interior.end(), out.begin() + 1);
  return out;
}

std::vector<double> acceleration_load(const MonotoneMap& phi, std::span<const double> phi_dot,
                                      const IgrParams& params, const DiscreteMeasure& mu, const Grid& grid) {
  const std::size_t n = grid.cells();
  std::vector<double> flux(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double dphi = phi.values[c + 1] - phi.values[c];
    const double dvel = phi_dot[c + 1] - phi_dot[c];
    flux[c] = 2.0 * params.alpha * mu.cell_mass[c] * dvel * dvel / (dphi * dphi * dphi);
  }
  std::vector<double> load(n - 1);
  for (std::size_t i = 1; i < n; ++i) load[i - 1] = flux[i - 1] - flux[i];
  return load;
}

}  // namespace

std::vector<double> lagrangian_velocity(const MonotoneMap& phi, const LinearData& data, const IgrParams& params,
                                        const DiscreteMeasure& mu, const Grid& grid) {
  TridiagonalSystem sys = hessian(phi, params, mu, grid);
  const auto g = nodal_forcing(data, params.alpha, mu, grid);
  std::copy(g.begin() + 1, g.end() - 1, sys.rhs.begin());
  return with_walls(solve_tridiagonal_spd(sys));
}

std::vector<double> lagrangian_acceleration(const MonotoneMap& phi, std::span<const double> phi_dot,
                                            const IgrParams& params, const DiscreteMeasure& mu,
                                            const Grid& grid) {
  if (phi_dot.size() != grid.size()) throw std::invalid_argument("lagrangian_acceleration: length mismatch");
  if (phi_dot.front() != 0.0 || phi_dot.back() != 0.0) {
    throw std::invalid_argument("lagrangian_acceleration: velocity must vanish at the walls");
  }
  TridiagonalSystem sys = hessian(phi, params, mu, grid);
  sys.rhs = acceleration_load(phi, phi_dot, params, mu, grid);
  return with_walls(solve_tridiagonal_spd(sys));
}

double lagrangian_residual(const LagrangianFrame& frame, const IgrParams& params, const DiscreteMeasure& mu,
                           const Grid& grid) {
  const TridiagonalSystem op = hessian(frame.phi, params, mu, grid);
  const auto load = acceleration_load(frame.phi, frame.phi_dot, params, mu, grid);
  const std::span<const double> interior(frame.phi_ddot.data() + 1, grid.cells() - 1);
  const auto applied = op.apply(interior);
  double worst = 0.0;
  for (std::size_t i = 0; i < applied.size(); ++i) {
    worst = std::max(worst, std::abs(applied[i] - load[i]) / mu.node_weight[i + 1]);
  }
  return worst;
}

LagrangianFrame make_frame(const LinearData& data, double t, const DiscreteMeasure& mu, const Grid& grid,
                           const IgrParams& params, const std::optional<MonotoneMap>& warm_start) {
  LagrangianFrame frame;
  frame.t = t;
  auto [phi, report] = solve_newton(data, t, params, mu, grid, warm_start);
  frame.phi = std::move(phi);
  frame.report = std::move(report);
  frame.phi_dot = lagrangian_velocity(frame.phi, data, params, mu, grid);
  frame.phi_ddot = lagrangian_acceleration(frame.phi, frame.phi_dot, params, mu, grid);
  return frame;
}

TimeSeries evolve(const LinearData& data, const DiscreteMeasure& mu, const Grid& grid, const IgrParams& params,
                  std::span<const double> times, const EvolveOptions& options) {
  validate(params);
  if (times.empty()) throw std::invalid_argument("evolve: no times given");
  if (!(times.front() >= 0.0)) throw std::invalid_argument("evolve: times must be nonnegative");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("evolve: times must be strictly increasing");
  }
  if (options.execution == Execution::parallel && options.warm_start) {
    throw std::invalid_argument("evolve: parallel execution needs cold starts");
  }

  TimeSeries series;
  series.alpha = params.alpha;
  series.frames.resize(times.size());

  auto rethrow = [](double t, const SolveError& e) {
    std::ostringstream msg;
    msg << e.what() << " at t = " << t;
    throw SolveError(msg.str(), e.report());
  };

  if (options.execution == Execution::serial) {
    std::optional<MonotoneMap> previous;
    for (std::size_t k = 0; k < times.size(); ++k) {
      try {
        series.frames[k] = make_frame(data, times[k], mu, grid, params,
                                      options.warm_start ? previous : std::nullopt);
      } catch (const SolveError& e) {
        rethrow(times[k], e);
      }
      previous = series.frames[k].phi;
    }
    return series;
  }

  // Cold starts make the frames independent; each iteration writes its own slot.
  const auto count = static_cast<std::ptrdiff_t>(times.size());
  std::vector<std::string> errors(times.size());
  std::vector<SolveReport> failed_reports(times.size());
  std::vector<char> failed(times.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    try {
      series.frames[idx] = make_frame(data, times[idx], mu, grid, params);
    } catch (const SolveError& e) {
      failed[idx] = 1;
      errors[idx] = e.what();
      failed_reports[idx] = e.report();
    }
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (failed[k]) rethrow(times[k], SolveError(errors[k], failed_reports[k]));
  }
  return series;
}

}  // namespace igr1d
