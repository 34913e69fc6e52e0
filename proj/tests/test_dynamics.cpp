#include <doctest.h>

#include <random>

#include "igr1d/dynamics.hpp"
#include "igr1d/scenarios.hpp"
#include "oracles.hpp"

using namespace igr1d;

namespace {

IgrParams with_alpha(double alpha) {
  IgrParams p;
  p.alpha = alpha;
  return p;
}

/// Lumped-mass plus barrier-stiffness operator assembled entry by entry from
/// the weak form, and the matching acceleration load, on interior nodes.
std::pair<oracle::Matrix, std::vector<double>> weak_acceleration_system(const std::vector<double>& phi,
                                                                          const std::vector<double>& phi_dot,
                                                                          double alpha, const DiscreteMeasure& mu,
                                                                          const Grid& g) {
  const std::size_t m = g.size() - 2;
  oracle::Matrix a(m, std::vector<double>(m, 0.0));
  std::vector<double> rhs(m, 0.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) a[i - 1][i - 1] += mu.node_weight[i];
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double h = g.width(c);
    const double slope = (phi[c + 1] - phi[c]) / h;
    const double rate = (phi_dot[c + 1] - phi_dot[c]) / h;
    // Hat-function slopes on this cell: -1/h for the left node, +1/h for the right.
    const std::size_t nodes[2] = {c, c + 1};
    const double dhat[2] = {-1.0 / h, 1.0 / h};
    for (int p = 0; p < 2; ++p) {
      const std::size_t i = nodes[p];
      if (i == 0 || i + 1 == g.size()) continue;
      rhs[i - 1] += 2.0 * alpha * mu.cell_mass[c] * dhat[p] * rate * rate / (slope * slope * slope);
      for (int q = 0; q < 2; ++q) {
        const std::size_t j = nodes[q];
        if (j == 0 || j + 1 == g.size()) continue;
        a[i - 1][j - 1] += alpha * mu.cell_mass[c] * dhat[p] * dhat[q] / (slope * slope);
      }
    }
  }
  return {a, rhs};
}

double mirror_gap(const std::vector<double>& p, const std::vector<double>& q, double a, double b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) gap = std::max(gap, std::abs(p[i] - (a + b - q[p.size() - 1 - i])));
  return gap;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("velocity at the identity is u0") {
    for (const auto& name : scenario_names()) {
      const auto sc = make_scenario(name);
      const Grid g = sc.grid(100);
      const auto mu = sc.measure(g);
      const auto u0 = sc.initial_velocity(g);
      const auto v = lagrangian_velocity(MonotoneMap::identity(g), make_regularized_data(u0, g), with_alpha(0.03), mu, g);
      CHECK(sup_distance(v, u0) <= 1e-13 * (1.0 + sup_norm(u0)));

      // The log barrier is stationary at the identity only for uniform mu.
      if (name == "randomfield") continue;
      const auto frame = make_frame(make_regularized_data(u0, g), 0.0, mu, g, with_alpha(0.03));
      CHECK(frame.phi.values == MonotoneMap::identity(g).values);
      CHECK(sup_distance(frame.phi_dot, u0) <= 1e-13 * (1.0 + sup_norm(u0)));
    }
  }

  TEST_CASE("zero data and zero velocity") {
    const Grid g = make_uniform_grid(0.0, 1.0, 32);
    const auto mu = uniform_measure(g);
    std::mt19937_64 rng(51);
    const auto phi = oracle::random_map(g, rng);
    const std::vector<double> zero(g.size(), 0.0);
    CHECK(lagrangian_velocity(phi, make_regularized_data(zero, g), with_alpha(0.1), mu, g) == zero);
    CHECK(lagrangian_acceleration(phi, zero, with_alpha(0.1), mu, g) == zero);
    LagrangianFrame frame;
    frame.phi = phi;
    frame.phi_dot = zero;
    frame.phi_ddot = zero;
    CHECK(lagrangian_residual(frame, with_alpha(0.1), mu, g) == 0.0);

    auto moving_wall = zero;
    moving_wall.back() = 1.0;
    CHECK_THROWS_AS(lagrangian_acceleration(phi, moving_wall, with_alpha(0.1), mu, g), std::invalid_argument);
  }

  TEST_CASE("acceleration matches a dense weak-form assembly") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 20; ++trial) {
      const Grid g = make_uniform_grid(0.0, 2.0, 12 + static_cast<std::size_t>(trial));
      std::vector<double> dens(g.size());
      std::uniform_real_distribution<double> d(0.5, 1.5);
      for (double& v : dens) v = d(rng);
      const auto mu = measure_from_density(g, dens);
      const auto phi = trial == 0 ? MonotoneMap::identity(g) : oracle::random_map(g, rng);
      const auto phi_dot = oracle::random_boundary_zero(g, rng);
      const double alpha = 0.05;
      const auto acc = lagrangian_acceleration(phi, phi_dot, with_alpha(alpha), mu, g);
      const auto [a, rhs] = weak_acceleration_system(phi.values, phi_dot, alpha, mu, g);
      const auto ref = oracle::dense_solve(a, rhs);
      CHECK(acc.front() == 0.0);
      CHECK(acc.back() == 0.0);
      CHECK(sup_distance(std::vector<double>(acc.begin() + 1, acc.end() - 1), ref) <= 1e-10 * (1.0 + sup_norm(ref)));
    }
  }

  TEST_CASE("time derivatives match central differences of recomputed minimizers") {
    for (const auto& name : {"sinewave", "twoblock", "randomfield"}) {
      const auto sc = make_scenario(name);
      const Grid g = sc.grid(128);
      const auto mu = sc.measure(g);
      const auto data = make_regularized_data(sc.initial_velocity(g), g);
      const double tc = characteristic_time(sc);
      for (double alpha : {1e-2, 1e-3}) {
        for (double factor : {0.5, 2.0}) {
          const auto params = with_alpha(alpha);
          const double t = factor * tc;
          const auto centre = make_frame(data, t, mu, g, params);
          std::vector<double> e1, e2;
          for (double rel : {1e-2, 5e-3, 2.5e-3}) {
            const double d = rel * tc;
            const auto plus = make_frame(data, t + d, mu, g, params, centre.phi);
            const auto minus = make_frame(data, t - d, mu, g, params, centre.phi);
            double a = 0.0, b = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
              const double p = plus.phi.values[i], c = centre.phi.values[i], m = minus.phi.values[i];
              a = std::max(a, std::abs((p - m) / (2 * d) - centre.phi_dot[i]));
              b = std::max(b, std::abs((p - 2 * c + m) / (d * d) - centre.phi_ddot[i]));
            }
            e1.push_back(a);
            e2.push_back(b);
          }
          CAPTURE(name);
          CAPTURE(alpha);
          CAPTURE(factor);
          for (std::size_t k = 1; k < e1.size(); ++k) {
            CHECK(oracle::log2_ratio(e1[k - 1], e1[k]) >= 1.9);
            CHECK(oracle::log2_ratio(e2[k - 1], e2[k]) >= 0.9);
          }
        }
      }
    }
  }

  TEST_CASE("evolved frames satisfy the weak Lagrangian equation") {
    const auto sc = make_scenario("sinewave");
    const Grid g = sc.grid(256);
    const auto mu = sc.measure(g);
    const auto data = make_regularized_data(sc.initial_velocity(g), g);
    const auto params = with_alpha(1e-2);
    const std::vector<double> times{0.0, 0.1, 0.3, 0.6, 1.0};
    const auto series = evolve(data, mu, g, params, times);
    REQUIRE(series.frames.size() == times.size());
    for (const auto& f : series.frames) {
      CHECK(lagrangian_residual(f, params, mu, g) <= 1e-9);
      CHECK(f.phi_dot.front() == 0.0);
      CHECK(f.phi_dot.back() == 0.0);
      CHECK(f.phi_ddot.front() == 0.0);
      CHECK(f.phi_ddot.back() == 0.0);
      auto perturbed = f;
      for (std::size_t i = 1; i + 1 < g.size(); ++i) perturbed.phi_ddot[i] += 1e-3;
      CHECK(lagrangian_residual(perturbed, params, mu, g) >= 1e-5);
    }
  }

  TEST_CASE("reversing u0 mirrors the flow") {
    const auto sc = make_scenario("sinewave");
    const Grid g = sc.grid(128);
    const auto mu = sc.measure(g);
    auto u0 = sc.initial_velocity(g);
    auto reversed = u0;
    for (double& v : reversed) v = -v;
    const auto params = with_alpha(1e-2);
    const std::vector<double> times{0.2, 0.7};
    const auto fwd = evolve(make_regularized_data(u0, g), mu, g, params, times);
    const auto bwd = evolve(make_regularized_data(reversed, g), mu, g, params, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(mirror_gap(fwd.frames[k].phi.values, bwd.frames[k].phi.values, g.a(), g.b()) <= 1e-10);
    }
  }

  TEST_CASE("maps are Lipschitz in t") {
    for (const auto& name : {"sinewave", "randomfield"}) {
      const auto sc = make_scenario(name);
      const Grid g = sc.grid(128);
      const auto mu = sc.measure(g);
      const auto data = make_regularized_data(sc.initial_velocity(g), g);
      const auto params = with_alpha(1e-2);
      const auto v = effective_velocity(data, params.alpha, mu, g);
      const std::vector<double> times{0.1, 0.15, 0.3, 0.5, 1.0};
      const auto series = evolve(data, mu, g, params, times);
      for (std::size_t k = 1; k < times.size(); ++k) {
        std::vector<double> dv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) dv[i] = (times[k] - times[k - 1]) * v[i];
        CHECK(l2_distance(mu, series.frames[k].phi.values, series.frames[k - 1].phi.values) <=
              l2_norm(mu, dv) + 1e-8);
      }
    }
  }

  TEST_CASE("evolve is deterministic and validates its schedule") {
    const auto sc = make_scenario("twoblock");
    const Grid g = sc.grid(64);
    const auto mu = sc.measure(g);
    const auto data = make_regularized_data(sc.initial_velocity(g), g);
    const auto params = with_alpha(1e-2);
    const std::vector<double> times{0.0, 0.05, 0.2};
    const auto a = evolve(data, mu, g, params, times);
    const auto b = evolve(data, mu, g, params, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(a.frames[k].phi.values == b.frames[k].phi.values);
      CHECK(a.frames[k].phi_dot == b.frames[k].phi_dot);
      CHECK(a.frames[k].phi_ddot == b.frames[k].phi_ddot);
    }
    CHECK_THROWS_AS(evolve(data, mu, g, params, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(data, mu, g, params, std::vector<double>{0.2, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(data, mu, g, params, std::vector<double>{-0.1, 0.1}), std::invalid_argument);
    EvolveOptions bad;
    bad.execution = Execution::parallel;
    CHECK_THROWS_AS(evolve(data, mu, g, params, times, bad), std::invalid_argument);
  }

  TEST_CASE("solver failures name the failing time") {
    const auto sc = make_scenario("sinewave");
    const Grid g = sc.grid(64);
    const auto mu = sc.measure(g);
    const auto data = make_regularized_data(sc.initial_velocity(g), g);
    auto params = with_alpha(1e-3);
    params.max_iter = 1;
    try {
      (void)evolve(data, mu, g, params, std::vector<double>{0.0, 1.0});
      FAIL("expected SolveError");
    } catch (const SolveError& e) {
      CHECK(std::string(e.what()).find("at t = 1") != std::string::npos);
    }
  }
}
