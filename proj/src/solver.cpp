#include "igr1d/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace igr1d {

const char* to_string(SolveMethod method) {
  return method == SolveMethod::newton ? "newton" : "shooting";
}

namespace {

void fill_derivative_stats(const MonotoneMap& phi, const DiscreteMeasure& mu, const Grid& grid,
                           SolveReport& report) {
  report.min_cell_derivative = std::numeric_limits<double>::infinity();
  report.max_cell_derivative = -std::numeric_limits<double>::infinity();
  report.density_floor = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const double dphi = phi.values[c + 1] - phi.values[c];
    const double slope = dphi / grid.width(c);
    report.min_cell_derivative = std::min(report.min_cell_derivative, slope);
    report.max_cell_derivative = std::max(report.max_cell_derivative, slope);
    report.density_floor = std::min(report.density_floor, mu.cell_mass[c] / dphi);
  }
}

void finish_report(const MonotoneMap& phi, const LinearData& data, double t, const IgrParams& params,
                   const DiscreteMeasure& mu, const Grid& grid, SolveReport& report) {
  fill_derivative_stats(phi, mu, grid, report);
  report.final_grad_norm = sup_norm(gradient(phi, data, t, params, mu, grid));
  report.objective = *objective_hat(phi, data, t, params, mu, grid);
  report.derivative_lower_bound = derivative_lower_bound(data, t, params.alpha, mu, grid);
}

// Largest step in direction d (interior nodes) that keeps every cell increment
// above 5% of its current value.
double fraction_to_boundary(const MonotoneMap& phi, const std::vector<double>& d) {
  const std::size_t n = phi.values.size() - 1;
  double step = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double left = c == 0 ? 0.0 : d[c - 1];
    const double right = c + 1 == n ? 0.0 : d[c];
    const double change = right - left;
    if (change < 0.0) {
      step = std::min(step, 0.95 * (phi.values[c + 1] - phi.values[c]) / -change);
    }
  }
  return step;
}

MonotoneMap displaced(const MonotoneMap& phi, const std::vector<double>& d, double step) {
  MonotoneMap out = phi;
  for (std::size_t i = 0; i < d.size(); ++i) out.values[i + 1] += step * d[i];
  return out;
}

std::vector<double> newton_direction(const MonotoneMap& phi, const std::vector<double>& grad,
                                     const IgrParams& params, const DiscreteMeasure& mu, const Grid& grid) {
  TridiagonalSystem h = hessian(phi, params, mu, grid);
  for (std::size_t i = 0; i < grad.size(); ++i) h.rhs[i] = -grad[i];
  return solve_tridiagonal_spd(h);
}

// Gradient entries combine barrier fluxes alpha m_c / dPhi_c whose increments
// are differences of node values of size ~|Phi|; rounding those values
// perturbs the gradient by about eps * |Phi| * (Hessian diagonal). Below that
// level the tolerance cannot be certified, so it acts as a floor.
double gradient_floor(const MonotoneMap& phi, const IgrParams& params, const DiscreteMeasure& mu,
                      const Grid& grid) {
  const TridiagonalSystem h = hessian(phi, params, mu, grid);
  const double scale = std::max({std::abs(grid.a()), std::abs(grid.b()), grid.length()});
  double worst = 0.0;
  for (double d : h.diag) worst = std::max(worst, d);
  return 8.0 * std::numeric_limits<double>::epsilon() * scale * worst;
}

bool usable_warm_start(const std::optional<MonotoneMap>& warm, const Grid& grid) {
  return warm.has_value() && warm->strictly_increasing(grid);
}

}  // namespace

std::pair<MonotoneMap, SolveReport> solve_newton(const LinearData& data, double t, const IgrParams& params,
                                                 const DiscreteMeasure& mu, const Grid& grid,
                                                 const std::optional<MonotoneMap>& warm_start) {
  validate(params);
  if (!(t >= 0.0)) throw std::invalid_argument("solve_newton: t must be nonnegative");

  MonotoneMap phi = usable_warm_start(warm_start, grid) ? *warm_start : MonotoneMap::identity(grid);
  SolveReport report;
  report.method = SolveMethod::newton;

  double f = *objective_hat(phi, data, t, params, mu, grid);
  auto grad = gradient(phi, data, t, params, mu, grid);
  double gnorm = sup_norm(grad);
  report.objective_history.push_back(f);

  auto fail = [&](const std::string& why) {
    report.final_grad_norm = gnorm;
    report.objective = f;
    fill_derivative_stats(phi, mu, grid, report);
    report.derivative_lower_bound = derivative_lower_bound(data, t, params.alpha, mu, grid);
    std::ostringstream msg;
    msg << "newton: " << why << " (iterations " << report.iterations << ", gradient " << gnorm << ")";
    throw SolveError(msg.str(), report);
  };

  report.gradient_floor = gradient_floor(phi, params, mu, grid);
  while (gnorm > std::max(params.newton_tol, report.gradient_floor)) {
    if (report.iterations >= params.max_iter) fail("iteration limit reached");
    const auto d = newton_direction(phi, grad, params, mu, grid);
    double slope = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) slope += grad[i] * d[i];

    // Objective values carry roundoff of order eps * |f|; allow that much slack
    // so the final quadratically convergent steps are not rejected.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    double step = fraction_to_boundary(phi, d);
    bool accepted = false;
    MonotoneMap trial;
    double f_trial = f;
    while (step > 1e-14) {
      trial = displaced(phi, d, step);
      const auto value = objective_hat(trial, data, t, params, mu, grid);
      if (value && *value <= f + 1e-4 * step * slope + slack) {
        f_trial = *value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) fail("line search failed");

    phi = std::move(trial);
    f = f_trial;
    grad = gradient(phi, data, t, params, mu, grid);
    gnorm = sup_norm(grad);
    ++report.iterations;
    report.objective_history.push_back(f);
    report.gradient_floor = gradient_floor(phi, params, mu, grid);
  }

  // Polish: full steps while they still reduce the gradient (roundoff floor).
  for (int k = 0; k < 2; ++k) {
    const auto d = newton_direction(phi, grad, params, mu, grid);
    const double step = fraction_to_boundary(phi, d);
    if (step < 1.0) break;
    MonotoneMap trial = displaced(phi, d, 1.0);
    if (!trial.strictly_increasing(grid)) break;
    const auto value = objective_hat(trial, data, t, params, mu, grid);
    const auto trial_grad = gradient(trial, data, t, params, mu, grid);
    const double trial_norm = sup_norm(trial_grad);
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    if (!(trial_norm < 0.5 * gnorm) || !value || *value > f + slack) break;
    phi = std::move(trial);
    grad = trial_grad;
    gnorm = trial_norm;
    f = *value;
    ++report.iterations;
    report.objective_history.push_back(f);
  }

  report.gradient_floor = gradient_floor(phi, params, mu, grid);
  finish_report(phi, data, t, params, mu, grid, report);
  return {std::move(phi), std::move(report)};
}

namespace {

using Quad = __float128;

struct ShootingProblem {
  std::vector<Quad> x, weight, mass, width, forcing;
  Quad alpha, t, a, b;

  ShootingProblem(const LinearData& data, double t_, double alpha_, const DiscreteMeasure& mu, const Grid& grid)
      : alpha(alpha_), t(t_), a(grid.a()), b(grid.b()) {
    const auto g = nodal_forcing(data, alpha_, mu, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      x.push_back(grid.node(i));
      weight.push_back(mu.node_weight[i]);
      forcing.push_back(g[i]);
    }
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      mass.push_back(mu.cell_mass[c]);
      width.push_back(grid.width(c));
    }
  }

  // Phi(b) - b; std::nullopt encodes +infinity.
  std::optional<Quad> gap(Quad c, std::vector<Quad>* phi_out = nullptr) const {
    const std::size_t n = mass.size();
    const Quad runaway = b + 4 * (b - a);
    Quad phi = a;
    Quad q = alpha * mass[0] * c / width[0];
    if (phi_out) {
      phi_out->assign(n + 1, Quad(0));
      (*phi_out)[0] = a;
    }
    for (std::size_t cell = 0; cell < n; ++cell) {
      if (!(q > 0)) return std::nullopt;
      phi += alpha * mass[cell] / q;
      if (phi_out) (*phi_out)[cell + 1] = phi;
      if (phi > runaway && !phi_out) return phi - b;
      if (cell + 1 < n) {
        const std::size_t i = cell + 1;
        q = q - weight[i] * (phi - x[i]) + t * forcing[i];
      }
    }
    return phi - b;
  }
};

Quad qabs(Quad v) { return v < 0 ? -v : v; }

std::string quad_str(Quad v) {
  std::ostringstream s;
  s << static_cast<double>(v);
  return s.str();
}

}  // namespace

ShootingState shooting_gap(const LinearData& data, double t, const IgrParams& params, const DiscreteMeasure& mu,
                           const Grid& grid, double c) {
  validate(params);
  const ShootingProblem problem(data, t, params.alpha, mu, grid);
  const auto g = problem.gap(c);
  return ShootingState{c, g ? static_cast<double>(*g) : std::numeric_limits<double>::infinity()};
}

std::pair<MonotoneMap, SolveReport> solve_shooting(const LinearData& data, double t, const IgrParams& params,
                                                   const DiscreteMeasure& mu, const Grid& grid, double c_tol) {
  validate(params);
  if (!(c_tol > 0.0)) throw std::invalid_argument("solve_shooting: c_tol must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("solve_shooting: t must be nonnegative");

  const ShootingProblem problem(data, t, params.alpha, mu, grid);
  const Quad target = Quad(c_tol) * (problem.b - problem.a);
  SolveReport report;
  report.method = SolveMethod::shooting;

  // gap(c) is decreasing in c; find lo with gap > 0 and hi with gap < 0.
  auto positive = [](const std::optional<Quad>& g) { return !g || *g > 0; };
  Quad lo = 1, hi = 1;
  auto g_mid = problem.gap(1);
  Quad best_c = 1;
  std::optional<Quad> best_gap = g_mid;
  int expansions = 0;
  if (positive(g_mid)) {
    while (positive(problem.gap(hi))) {
      lo = hi;
      hi *= 2;
      if (++expansions > 400) {
        throw SolveError("shooting: bracket failure scanning c in [1, " + quad_str(hi) + "]", report);
      }
    }
  } else {
    while (!positive(problem.gap(lo))) {
      hi = lo;
      lo /= 2;
      if (++expansions > 400) {
        throw SolveError("shooting: bracket failure scanning c in [" + quad_str(lo) + ", 1]", report);
      }
    }
  }

  auto better = [&](Quad c, const std::optional<Quad>& g) {
    if (g && (!best_gap || qabs(*g) < qabs(*best_gap))) {
      best_c = c;
      best_gap = g;
    }
  };
  better(lo, problem.gap(lo));
  better(hi, problem.gap(hi));

  int iterations = 0;
  while (!(best_gap && qabs(*best_gap) <= target)) {
    const Quad mid = (lo + hi) / 2;
    if (!(mid > lo && mid < hi) || ++iterations > 2000) break;
    const auto g = problem.gap(mid);
    better(mid, g);
    if (positive(g)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  report.iterations = iterations;
  report.shooting_constant = static_cast<double>(best_c);
  if (!best_gap || qabs(*best_gap) > target) {
    throw SolveError("shooting: endpoint gap " + quad_str(best_gap ? *best_gap : Quad(1e300)) +
                         " above tolerance after bisection",
                     report);
  }

  std::vector<Quad> values;
  problem.gap(best_c, &values);
  MonotoneMap phi;
  phi.values.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) phi.values[i] = static_cast<double>(values[i]);
  phi.values.front() = grid.a();
  phi.values.back() = grid.b();
  if (!phi.strictly_increasing(grid)) {
    throw SolveError("shooting: map lost strict monotonicity after rounding", report);
  }
  finish_report(phi, data, t, params, mu, grid, report);
  return {std::move(phi), std::move(report)};
}

double derivative_lower_bound(const LinearData& data, double t, double alpha, const DiscreteMeasure& mu,
                              const Grid& grid) {
  auto v = effective_velocity(data, alpha, mu, grid);
  v.front() = 0.0;
  v.back() = 0.0;
  const double tv = t * l2_norm(mu, v);
  double total_mass = 0.0;
  for (double m : mu.cell_mass) total_mass += m;
  const double bound = alpha / (2.0 * (std::pow(grid.length(), 1.5) + tv) * total_mass);
  return std::min(bound, 0.2);
}

BoundCheck check_bounds(const MonotoneMap& phi, const LinearData& data, double t, const IgrParams& params,
                        const DiscreteMeasure& mu, const Grid& grid) {
  if (!phi.nondecreasing(grid)) throw std::invalid_argument("check_bounds: map is not monotone");
  BoundCheck out;
  out.lower_bound = derivative_lower_bound(data, t, params.alpha, mu, grid);
  out.min_cell_derivative = std::numeric_limits<double>::infinity();
  out.max_cell_derivative = -std::numeric_limits<double>::infinity();
  out.density_floor = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const double dphi = phi.values[c + 1] - phi.values[c];
    const double slope = dphi / grid.width(c);
    if (slope < out.min_cell_derivative) {
      out.min_cell_derivative = slope;
      argmin = c;
    }
    out.max_cell_derivative = std::max(out.max_cell_derivative, slope);
    out.density_floor = std::min(out.density_floor,
                                 dphi > 0.0 ? mu.cell_mass[c] / dphi : std::numeric_limits<double>::infinity());
  }
  if (out.min_cell_derivative < out.lower_bound * (1.0 - 1e-6)) out.violating_cell = argmin;
  return out;
}

}  // namespace igr1d
