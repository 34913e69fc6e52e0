#pragma once

#include <span>
#include <string>
#include <vector>

#include "igr1d/functional.hpp"
#include "igr1d/solver.hpp"

namespace igr1d {

/// Serial execution is the reference path; parallel runs independent items
/// through OpenMP and produces bit-identical results.
enum class Execution { serial, parallel };

/// Deformation map with its first two time derivatives at time t.
struct LagrangianFrame {
  double t = 0.0;
  MonotoneMap phi;
  std::vector<double> phi_dot;   // Lagrangian velocity, zero at both walls
  std::vector<double> phi_ddot;  // Lagrangian acceleration, zero at both walls
  SolveReport report;
};

struct TimeSeries {
  std::vector<LagrangianFrame> frames;
  double alpha = 0.0;
  std::string scenario;
};

/// Solves <phi, dPhi/dt>_mu + alpha <d phi, d(dPhi/dt) / (dPhi)^2>_mu = f(phi)
/// for the hat functions phi of the interior nodes, where f is the data
/// functional per unit time. At Phi = Id with regularized data this returns u0.
std::vector<double> lagrangian_velocity(const MonotoneMap& phi, const LinearData& data, const IgrParams& params,
                                        const DiscreteMeasure& mu, const Grid& grid);

/// Same operator with right side 2 alpha <d phi, (d phi_dot)^2 / (dPhi)^3>_mu.
std::vector<double> lagrangian_acceleration(const MonotoneMap& phi, std::span<const double> phi_dot,
                                            const IgrParams& params, const DiscreteMeasure& mu, const Grid& grid);

/// Residual of the weak second-order Lagrangian equation tested against every
/// interior hat function, divided by that node's lumped mass (units of
/// acceleration). Sup-norm over interior nodes.
double lagrangian_residual(const LagrangianFrame& frame, const IgrParams& params, const DiscreteMeasure& mu,
                           const Grid& grid);

struct EvolveOptions {
  bool warm_start = true;  // seed each solve with the previous frame
  Execution execution = Execution::serial;
};

/// Minimizes the time-t problem for every entry of times and attaches the
/// velocity and acceleration. Parallel execution requires warm_start = false.
/// Solver failures are rethrown as SolveError naming the failing t.
TimeSeries evolve(const LinearData& data, const DiscreteMeasure& mu, const Grid& grid, const IgrParams& params,
                  std::span<const double> times, const EvolveOptions& options = {});

/// Builds a frame at a single time (solve, velocity, acceleration).
LagrangianFrame make_frame(const LinearData& data, double t, const DiscreteMeasure& mu, const Grid& grid,
                           const IgrParams& params, const std::optional<MonotoneMap>& warm_start = std::nullopt);

}  // namespace igr1d
