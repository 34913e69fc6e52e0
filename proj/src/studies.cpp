#include "igr1d/studies.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "igr1d/eulerian.hpp"
#include "igr1d/sticky.hpp"

namespace igr1d {

namespace {

LinearData make_data(std::span<const double> u0, const Grid& grid, DataMode mode) {
  return mode == DataMode::raw ? make_raw_data(u0) : make_regularized_data(u0, grid);
}

double sup_between(const MonotoneMap& a, const MonotoneMap& b) { return sup_distance(a.values, b.values); }

}  // namespace

std::optional<double> empirical_order(double previous, double current, double refinement) {
  if (!(previous > 0.0) || !(current > 0.0) || !std::isfinite(previous) || !std::isfinite(current)) {
    return std::nullopt;
  }
  return std::log(previous / current) / std::log(refinement);
}

GammaStudy gamma_study(std::span<const double> u0, const DiscreteMeasure& mu, const Grid& grid, double t,
                       std::span<const double> alphas, const IgrParams& params, DataMode mode,
                       Execution execution) {
  if (alphas.empty()) throw std::invalid_argument("gamma_study: no alphas");
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (!(alphas[k] > 0.0)) throw std::invalid_argument("gamma_study: alphas must be positive");
    if (k > 0 && !(alphas[k] < alphas[k - 1])) {
      throw std::invalid_argument("gamma_study: alphas must be strictly decreasing");
    }
  }
  if (!(t >= 0.0)) throw std::invalid_argument("gamma_study: t must be nonnegative");

  GammaStudy study;
  study.sticky = sticky_solution(u0, t, mu, grid);
  const auto raw = make_raw_data(u0);
  const auto data = make_data(u0, grid, mode);
  study.min_energy = objective_nominal(study.sticky.values, raw, t, mu, grid);
  study.mirrored_discrepancy = sup_between(study.sticky, sticky_solution_mirrored(u0, t, mu, grid));

  study.rows.resize(alphas.size());
  auto row = [&](std::size_t k) {
    IgrParams p = params;
    p.alpha = alphas[k];
    const auto [phi, report] = solve_newton(data, t, p, mu, grid);
    GammaStudyRow& r = study.rows[k];
    r.alpha = alphas[k];
    r.sup_distance = sup_between(phi, study.sticky);
    r.l2mu_distance = l2_distance(mu, phi.values, study.sticky.values);
    r.energy_gap = objective_nominal(phi.values, raw, t, mu, grid) - study.min_energy;
    r.min_derivative = report.min_cell_derivative;
    if (mode == DataMode::raw) {
      r.raw_sup_distance = 0.0;
    } else {
      const auto raw_phi = solve_newton(raw, t, p, mu, grid).first;
      r.raw_sup_distance = sup_between(phi, raw_phi);
    }
  };

  if (execution == Execution::serial) {
    for (std::size_t k = 0; k < alphas.size(); ++k) row(k);
    return study;
  }
  const auto count = static_cast<std::ptrdiff_t>(alphas.size());
  std::vector<std::string> errors(alphas.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      row(static_cast<std::size_t>(k));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericalError("gamma_study: " + e);
  }
  return study;
}

StabilityStudy stability_study(int pairs, std::uint64_t seed, const DiscreteMeasure& mu, const Grid& grid, double t,
                               double alpha, const IgrParams& params, Execution execution) {
  if (pairs < 1) throw std::invalid_argument("stability_study: pairs must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("stability_study: t must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("stability_study: alpha must be nonnegative");

  // Velocity fields are drawn serially so the ensemble does not depend on
  // the execution mode.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> us, vs;
  for (int k = 0; k < pairs; ++k) {
    std::vector<double> u, v;
    do {
      auto fu = random_sine_series(rng(), grid.a(), grid.b());
      auto fv = random_sine_series(rng(), grid.a(), grid.b());
      u.assign(grid.size(), 0.0);
      v.assign(grid.size(), 0.0);
      for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        u[i] = fu(grid.node(i));
        v[i] = fv(grid.node(i));
      }
    } while (l2_distance(mu, u, v) == 0.0);
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
  }

  StabilityStudy study;
  study.ratios.assign(static_cast<std::size_t>(pairs), 0.0);
  IgrParams p = params;
  p.alpha = alpha;
  auto solve = [&](const std::vector<double>& w) {
    if (alpha == 0.0) return sticky_solution(w, t, mu, grid);
    return solve_newton(make_raw_data(w), t, p, mu, grid).first;
  };
  auto ratio = [&](std::size_t k) {
    const auto phi_u = solve(us[k]);
    const auto phi_v = solve(vs[k]);
    std::vector<double> diff(grid.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = t * (us[k][i] - vs[k][i]);
    study.ratios[k] = l2_distance(mu, phi_u.values, phi_v.values) / l2_norm(mu, diff);
  };

  if (execution == Execution::serial) {
    for (std::size_t k = 0; k < us.size(); ++k) ratio(k);
  } else {
    const auto count = static_cast<std::ptrdiff_t>(us.size());
    std::vector<std::string> errors(us.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      try {
        ratio(static_cast<std::size_t>(k));
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(k)] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw NumericalError("stability_study: " + e);
    }
  }
  study.worst_ratio = *std::max_element(study.ratios.begin(), study.ratios.end());
  return study;
}

std::vector<RefinementRow> refinement_study(const Scenario& scenario, const IgrParams& params, double t,
                                            std::span<const std::size_t> Ns, std::span<const double> deltas,
                                            DataMode mode) {
  if (Ns.empty() || Ns.size() != deltas.size()) {
    throw std::invalid_argument("refinement_study: Ns and deltas must be nonempty and of equal length");
  }
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    if (k > 0 && !(Ns[k] > Ns[k - 1])) throw std::invalid_argument("refinement_study: Ns must be increasing");
    if (!(deltas[k] > 0.0) || !(t - deltas[k] >= 0.0)) {
      throw std::invalid_argument("refinement_study: need delta > 0 and t - delta >= 0");
    }
  }

  std::vector<RefinementRow> rows;
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    const Grid grid = scenario.grid(Ns[k]);
    const auto mu = scenario.measure(grid);
    const auto data = make_data(scenario.initial_velocity(grid), grid, mode);
    const double d = deltas[k];
    const std::vector<double> times{t - d, t, t + d};
    const TimeSeries series = evolve(data, mu, grid, params, times);
    const auto& f = series.frames;

    RefinementRow r;
    r.cells = Ns[k];
    r.delta = d;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double plus = f[2].phi.values[i];
      const double here = f[1].phi.values[i];
      const double minus = f[0].phi.values[i];
      r.phi_dot_error = std::max(r.phi_dot_error, std::abs((plus - minus) / (2.0 * d) - f[1].phi_dot[i]));
      r.phi_ddot_error =
          std::max(r.phi_ddot_error, std::abs((plus - 2.0 * here + minus) / (d * d) - f[1].phi_ddot[i]));
    }
    const auto residual = eulerian_residual(f, mu, grid, grid, params);
    r.mass_residual = residual.mass;
    r.momentum_residual = residual.momentum;
    const auto budget = conservation_report(series, mu, grid, grid, params);
    r.budget_residual = *budget[1].budget_residual;
    for (const auto& b : budget) r.mass_drift = std::max(r.mass_drift, std::abs(b.mass_drift));

    if (!rows.empty()) {
      const auto& p = rows.back();
      const double ratio = static_cast<double>(r.cells) / static_cast<double>(p.cells);
      r.phi_dot_order = empirical_order(p.phi_dot_error, r.phi_dot_error, ratio);
      r.phi_ddot_order = empirical_order(p.phi_ddot_error, r.phi_ddot_error, ratio);
      r.mass_order = empirical_order(p.mass_residual, r.mass_residual, ratio);
      r.momentum_order = empirical_order(p.momentum_residual, r.momentum_residual, ratio);
      r.budget_order = empirical_order(p.budget_residual, r.budget_residual, ratio);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace igr1d
