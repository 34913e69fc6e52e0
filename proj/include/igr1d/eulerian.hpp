#pragma once

#include <optional>
#include <span>
#include <vector>

#include "igr1d/dynamics.hpp"

namespace igr1d {

/// Velocity, density and entropic pressure sampled at Eulerian nodes.
struct EulerianState {
  double t = 0.0;
  std::vector<double> x;          // Eulerian grid nodes
  std::vector<double> u;          // velocity, zero at both walls
  std::vector<double> rho;        // mass per unit length, > 0
  std::vector<double> sigma;      // entropic pressure; empty until filled
  std::vector<double> cell_mass;  // exact pushforward mass of each Eulerian cell
};

/// How label-space data are carried to Eulerian nodes.
///  linear: Phi^{-1} and Phi_dot piecewise linear; rho = mu(s) / dPhi_c with the
///          slope of the label cell containing s = Phi^{-1}(x) (mean of both
///          sides when x hits an image node).
///  cubic:  local four-node interpolants of Phi, Phi_dot and the node density;
///          rho = mu(s) / Phi'(s). Its error is smooth in x and t, which
///          difference quotients of the conservation laws need.
enum class Reconstruction { linear, cubic };

/// Label s in [a, b] with Phi(s) = x for the piecewise-linear map.
double inverse_map(const MonotoneMap& phi, const Grid& grid, double x);

/// u = Phi_dot o Phi^{-1} and rho = (mu / dPhi) o Phi^{-1} at the nodes of
/// eulerian_grid, plus exact pushforward cell masses. sigma is left empty.
EulerianState to_eulerian(const LagrangianFrame& frame, const DiscreteMeasure& mu, const Grid& grid,
                          const Grid& eulerian_grid, Reconstruction reconstruction = Reconstruction::linear);

/// Lumped P1 solve of  Sigma / rho - alpha d/dx(d Sigma/dx / rho) = source  with
/// the natural (zero-flux) Neumann condition at both walls. The source is
/// given at the nodes; 1/rho is averaged per cell in the stiffness term.
std::vector<double> solve_screened_neumann(const Grid& x, std::span<const double> rho,
                                           std::span<const double> source, double alpha);

/// Fills sigma from the source 2 alpha (du/dx)^2, taken per cell from the nodal u
/// and lumped onto the nodes.
EulerianState entropic_pressure(EulerianState state, const IgrParams& params);

/// Sigma at the image nodes Phi_i, solved on the Eulerian grid formed by those
/// nodes. There the density of each cell is exactly m_c / dPhi_c and the
/// velocity at each node exactly Phi_dot_i, so nothing is interpolated.
std::vector<double> image_pressure(const LagrangianFrame& frame, const DiscreteMeasure& mu, const Grid& grid,
                                   const IgrParams& params);

/// Sum of the exact pushforward cell masses.
double total_mass(const EulerianState& state);

/// int mu Phi_dot ds over label space, exact for the piecewise-linear mu and
/// Phi_dot; equals the Eulerian momentum int rho u dx by change of variables.
double total_momentum(const LagrangianFrame& frame, const DiscreteMeasure& mu, const Grid& grid);

struct ConservationRow {
  double t = 0.0;
  double mass = 0.0;
  double mass_drift = 0.0;  // mass - 1
  double momentum = 0.0;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  /// |d/dt momentum + sigma_b - sigma_a| by central differences in t; nullopt
  /// at the first and last frame.
  std::optional<double> budget_residual;
};

/// Mass on eulerian_grid, momentum in label space, wall pressures from image_pressure.
std::vector<ConservationRow> conservation_report(const TimeSeries& series, const DiscreteMeasure& mu,
                                                 const Grid& grid, const Grid& eulerian_grid,
                                                 const IgrParams& params);

struct EulerianResidual {
  double mass = 0.0;
  double momentum = 0.0;
};

/// Sup-norm over interior Eulerian nodes of the discrete conservation laws
///   d_t rho + d_x(rho u) and d_t(rho u) + d_x(rho u^2 + Sigma)
/// with central differences in t (three equally spaced frames) and in x,
/// using the cubic reconstruction.
EulerianResidual eulerian_residual(std::span<const LagrangianFrame> frames, const DiscreteMeasure& mu,
                                   const Grid& grid, const Grid& eulerian_grid, const IgrParams& params);

}  // namespace igr1d
