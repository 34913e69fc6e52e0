#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "igr1d/functional.hpp"
#include "igr1d/numerics.hpp"

namespace igr1d {

enum class SolveMethod { newton, shooting };

const char* to_string(SolveMethod method);

/// Convergence diagnostics of one time-t solve.
struct SolveReport {
  SolveMethod method = SolveMethod::newton;
  int iterations = 0;
  double final_grad_norm = 0.0;
  double objective = 0.0;
  double min_cell_derivative = 0.0;
  double max_cell_derivative = 0.0;
  double derivative_lower_bound = 0.0;  // a-priori floor on dPhi
  double density_floor = 0.0;           // min_c m_c / dPhi_c
  double shooting_constant = 0.0;       // 1/dPhi in the first cell (shooting only)
  double gradient_floor = 0.0;          // rounding level of the gradient at the final map
  std::vector<double> objective_history;  // objective at each accepted iterate
};

/// One shot of the forward integration: Phi(b) - b for a trial constant c.
/// phi_b_gap is +infinity when the flux turns nonpositive before reaching b.
struct ShootingState {
  double c = 1.0;
  double phi_b_gap = 0.0;
};

/// Solver failure that still carries the diagnostics gathered so far.
class SolveError : public NumericalError {
 public:
  SolveError(const std::string& what, SolveReport report)
      : NumericalError(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Damped Newton on the discrete objective with a fraction-to-boundary rule:
/// no cell increment shrinks below 5% of its current value in one step.
/// Starts from warm_start when it is a valid strictly increasing map,
/// otherwise from the identity. Stops once the gradient sup-norm is below
/// max(newton_tol, gradient_floor); the floor only exceeds the tolerance for
/// strongly compressed maps. Throws SolveError when max_iter is exceeded.
std::pair<MonotoneMap, SolveReport> solve_newton(const LinearData& data, double t, const IgrParams& params,
                                                 const DiscreteMeasure& mu, const Grid& grid,
                                                 const std::optional<MonotoneMap>& warm_start = std::nullopt);

/// Solves the discrete optimality system by forward integration of
///   alpha m_c / dPhi_c = q_c,  q_{i} = q_{i-1} - W_i (Phi_i - x_i) + t g_i,
/// the discrete analogue of mu / dPhi = C + (1/alpha) int_a^x (v - (Phi - s)) dmu,
/// with bisection on the first-cell value c = 1 / dPhi_0. Larger c gives a
/// smaller Phi(b), so the endpoint gap is monotone in c. The recursion
/// amplifies errors roughly like exp((b - a) / sqrt(alpha)), so it runs in
/// quadruple precision.
std::pair<MonotoneMap, SolveReport> solve_shooting(const LinearData& data, double t, const IgrParams& params,
                                                   const DiscreteMeasure& mu, const Grid& grid,
                                                   double c_tol = 1e-12);

ShootingState shooting_gap(const LinearData& data, double t, const IgrParams& params,
                          const DiscreteMeasure& mu, const Grid& grid, double c);

/// min{ alpha / (2((b-a)^{3/2} + ||t v||_{L2(mu)}) mu([a,b])), 1/5 }, where v is
/// the effective pointwise velocity of the data.
double derivative_lower_bound(const LinearData& data, double t, double alpha, const DiscreteMeasure& mu,
                              const Grid& grid);

struct BoundCheck {
  double lower_bound = 0.0;
  double min_cell_derivative = 0.0;
  double max_cell_derivative = 0.0;
  double density_floor = 0.0;
  std::optional<std::size_t> violating_cell;

  bool ok() const { return !violating_cell.has_value(); }
};

/// Compares the cell derivatives of phi with the a-priori floor (relative slack 1e-6).
BoundCheck check_bounds(const MonotoneMap& phi, const LinearData& data, double t, const IgrParams& params,
                        const DiscreteMeasure& mu, const Grid& grid);

}  // namespace igr1d
