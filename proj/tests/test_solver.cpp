#include <doctest.h>

#include <limits>
#include <random>

#include "igr1d/scenarios.hpp"
#include "igr1d/solver.hpp"
#include "oracles.hpp"

using namespace igr1d;

namespace {

IgrParams with_alpha(double alpha) {
  IgrParams p;
  p.alpha = alpha;
  return p;
}

struct Problem {
  Scenario sc;
  Grid g;
  DiscreteMeasure mu;
  LinearData data;
};

Problem problem(const std::string& name, std::size_t n, DataMode mode = DataMode::regularized) {
  auto sc = make_scenario(name);
  Grid g = sc.grid(n);
  auto mu = sc.measure(g);
  const auto u0 = sc.initial_velocity(g);
  auto data = mode == DataMode::raw ? make_raw_data(u0) : make_regularized_data(u0, g);
  return {std::move(sc), std::move(g), std::move(mu), std::move(data)};
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("zero data returns the identity") {
    const auto p = problem("identity", 64);
    for (double alpha : {1e-3, 1e-1}) {
      for (double t : {0.0, 1.0, 10.0}) {
        const auto [phi, report] = solve_newton(p.data, t, with_alpha(alpha), p.mu, p.g);
        CHECK(report.iterations == 0);
        CHECK(phi.values == MonotoneMap::identity(p.g).values);
        const auto [shot, sreport] = solve_shooting(p.data, t, with_alpha(alpha), p.mu, p.g);
        CHECK(sreport.shooting_constant == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sup_distance(shot.values, phi.values) <= 1e-12);
      }
    }
  }

  TEST_CASE("antisymmetric data keeps the midpoint fixed") {
    const auto p = problem("twoblock", 128);
    const double t = 2.0 * p.sc.shock_time;
    for (double alpha : {1e-3, 1e-2, 1e-1}) {
      const auto [phi, report] = solve_newton(p.data, t, with_alpha(alpha), p.mu, p.g);
      CHECK(std::abs(phi.values[64] - 0.5) <= 1e-10);
      for (std::size_t i = 0; i < p.g.size(); ++i) {
        CHECK(std::abs(phi.values[i] + phi.values[p.g.size() - 1 - i] - 1.0) <= 1e-10);
      }
    }
  }

  TEST_CASE("Newton and shooting agree and both satisfy the optimality condition") {
    for (const auto& name : scenario_names()) {
      const auto p = problem(name, 128);
      for (double alpha : {1e-1, 1e-2, 1e-3}) {
        for (double factor : {0.5, 2.0}) {
          const double t = factor * characteristic_time(p.sc);
          const auto params = with_alpha(alpha);
          const auto [newton, nr] = solve_newton(p.data, t, params, p.mu, p.g);
          const auto [shot, sr] = solve_shooting(p.data, t, params, p.mu, p.g);
          CAPTURE(name);
          CAPTURE(alpha);
          CHECK(nr.final_grad_norm <= params.newton_tol);
          CHECK(nr.iterations <= 50);
          CHECK(sup_distance(newton.values, shot.values) <= 1e-8);
          CHECK(sup_norm(gradient(shot, p.data, t, params, p.mu, p.g)) <= 10.0 * params.newton_tol);
          CHECK(sr.method == SolveMethod::shooting);
        }
      }
    }
  }

  TEST_CASE("shooting gap is monotone in the constant") {
    const auto p = problem("sinewave", 64);
    const auto params = with_alpha(1e-2);
    double prev = std::numeric_limits<double>::infinity();
    for (double c : {0.5, 0.8, 1.0, 1.2, 1.6, 2.5}) {
      const double gap = shooting_gap(p.data, 0.3, params, p.mu, p.g, c).phi_b_gap;
      if (std::isfinite(gap) && std::isfinite(prev)) CHECK(gap < prev);
      prev = gap;
    }
  }

  TEST_CASE("warm starts do not change the minimizer") {
    std::mt19937_64 rng(41);
    const auto p = problem("randomfield", 256);
    const auto params = with_alpha(1e-2);
    const double t = 1.5 * p.sc.shock_time;
    const auto [cold, cr] = solve_newton(p.data, t, params, p.mu, p.g);
    for (int trial = 0; trial < 5; ++trial) {
      const auto start = oracle::random_map(p.g, rng, 0.3, 3.0);
      const auto [warm, wr] = solve_newton(p.data, t, params, p.mu, p.g, start);
      CHECK(sup_distance(cold.values, warm.values) <= 1e-10);
    }
    // An infeasible warm start falls back to the identity.
    MonotoneMap bad = MonotoneMap::identity(p.g);
    std::swap(bad.values[3], bad.values[4]);
    const auto [fallback, fr] = solve_newton(p.data, t, params, p.mu, p.g, bad);
    CHECK(fallback.values == cold.values);
  }

  TEST_CASE("objective never increases along the iteration") {
    for (const auto& name : {"sinewave", "twoblock", "randomfield"}) {
      const auto p = problem(name, 256);
      const auto [phi, report] = solve_newton(p.data, 3.0 * p.sc.shock_time, with_alpha(1e-3), p.mu, p.g);
      REQUIRE(report.objective_history.size() >= 2);
      // Up to the roundoff slack the line search grants near convergence.
      for (std::size_t k = 1; k < report.objective_history.size(); ++k) {
        const double f = report.objective_history[k - 1];
        CHECK(report.objective_history[k] <= f + 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f)));
      }
      CHECK(report.min_cell_derivative > 0.0);
      CHECK(phi.strictly_increasing(p.g));
    }
  }

  TEST_CASE("iteration limit raises a SolveError with diagnostics") {
    const auto p = problem("sinewave", 128);
    auto params = with_alpha(1e-3);
    params.max_iter = 2;
    try {
      (void)solve_newton(p.data, 2.0 * p.sc.shock_time, params, p.mu, p.g);
      FAIL("expected SolveError");
    } catch (const SolveError& e) {
      CHECK(e.report().iterations == 2);
      CHECK(e.report().final_grad_norm > params.newton_tol);
    }
    CHECK_THROWS_AS(solve_newton(p.data, 1.0, with_alpha(0.0), p.mu, p.g), std::invalid_argument);
    CHECK_THROWS_AS(solve_newton(p.data, -1.0, with_alpha(0.1), p.mu, p.g), std::invalid_argument);
  }

  TEST_CASE("derivative lower bound: formula and check") {
    const auto p = problem("sinewave", 256);
    const double t = 2.0 * p.sc.shock_time;
    // Independent evaluation: sup of the effective velocity is bounded by the
    // L2 norm computed here with Simpson on u0 - alpha u0'' = (1 + alpha pi^2) sin(pi x).
    const double alpha = 1e-2;
    const double v_l2 = (1.0 + alpha * std::numbers::pi * std::numbers::pi) *
                        std::sqrt(oracle::simpson([](double x) { return std::pow(std::sin(std::numbers::pi * x), 2); },
                                                  0.0, 1.0));
    const double expected = std::min(alpha / (2.0 * (1.0 + t * v_l2)), 0.2);
    CHECK(derivative_lower_bound(p.data, t, alpha, p.mu, p.g) == doctest::Approx(expected).epsilon(1e-3));

    double prev = 0.0;
    for (double a : {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1}) {
      const double bound = derivative_lower_bound(p.data, t, a, p.mu, p.g);
      CHECK(bound > prev);
      prev = bound;
      const auto params = with_alpha(a);
      const auto [phi, report] = solve_newton(p.data, t, params, p.mu, p.g);
      const auto check = check_bounds(phi, p.data, t, params, p.mu, p.g);
      CHECK(check.ok());
      CHECK(check.min_cell_derivative >= check.lower_bound * (1.0 - 1e-6));
      CHECK(check.density_floor > 0.0);
    }

    const auto zero = problem("identity", 32);
    CHECK(derivative_lower_bound(zero.data, 5.0, 10.0, zero.mu, zero.g) == 0.2);
    const auto id = MonotoneMap::identity(zero.g);
    const auto check = check_bounds(id, zero.data, 5.0, with_alpha(0.1), zero.mu, zero.g);
    CHECK(check.ok());
    CHECK(check.min_cell_derivative == doctest::Approx(1.0));
  }

  TEST_CASE("check_bounds names a violating cell") {
    const auto p = problem("sinewave", 16);
    MonotoneMap phi = MonotoneMap::identity(p.g);
    phi.values[5] = phi.values[4] + 1e-9;
    const auto check = check_bounds(phi, p.data, 1.0, with_alpha(0.1), p.mu, p.g);
    REQUIRE_FALSE(check.ok());
    CHECK(*check.violating_cell == 4);
  }

  TEST_CASE("raw data path") {
    const auto p = problem("sinewave", 128, DataMode::raw);
    const auto params = with_alpha(1e-2);
    const auto [newton, nr] = solve_newton(p.data, 0.5, params, p.mu, p.g);
    const auto [shot, sr] = solve_shooting(p.data, 0.5, params, p.mu, p.g);
    CHECK(sup_distance(newton.values, shot.values) <= 1e-8);
  }
}
