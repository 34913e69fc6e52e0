#include <doctest.h>

#include <random>

#include "igr1d/numerics.hpp"
#include "oracles.hpp"

using namespace igr1d;

TEST_SUITE("numerics") {
  TEST_CASE("uniform grid nodes") {
    const Grid g = make_uniform_grid(0.0, 1.0, 4);
    const std::vector<double> expected{0.0, 0.25, 0.5, 0.75, 1.0};
    CHECK(std::vector<double>(g.nodes().begin(), g.nodes().end()) == expected);
    for (double h : g.widths()) CHECK(h == doctest::Approx(0.25).epsilon(1e-15));

    const Grid g2 = make_uniform_grid(-1.0, 1.0, 2);
    CHECK(g2.node(0) == -1.0);
    CHECK(g2.node(1) == 0.0);
    CHECK(g2.node(2) == 1.0);
  }

  TEST_CASE("grid preconditions") {
    CHECK_THROWS_AS(make_uniform_grid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_uniform_grid(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_uniform_grid(2.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
  }

  TEST_CASE("grid widths sum to the length and locate finds the cell") {
    const Grid g({0.0, 0.1, 0.35, 0.6, 1.0});
    double sum = 0.0;
    for (double h : g.widths()) sum += h;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.locate(0.0) == 0);
    CHECK(g.locate(0.2) == 1);
    CHECK(g.locate(0.99) == 3);
    CHECK(g.locate(1.0) == 3);
  }

  TEST_CASE("uniform density gives equal cell masses") {
    const Grid g = make_uniform_grid(0.0, 1.0, 4);
    const auto mu = uniform_measure(g);
    for (double m : mu.cell_mass) CHECK(m == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("density scaling is irrelevant") {
    const Grid g = make_uniform_grid(0.0, 1.0, 7);
    std::vector<double> one(g.size(), 1.0), two(g.size(), 2.0);
    const auto a = measure_from_density(g, one);
    const auto b = measure_from_density(g, two);
    CHECK(a.cell_mass == b.cell_mass);
    CHECK(a.node_weight == b.node_weight);
    CHECK(a.node_density == b.node_density);
  }

  TEST_CASE("trapezoid masses of a linear density") {
    // density 1 + x on [0, 1], N = 2: exact integrals 0.625 and 0.875, total 1.5.
    const Grid g = make_uniform_grid(0.0, 1.0, 2);
    const auto mu = measure_from_density(g, std::vector<double>{1.0, 1.5, 2.0});
    CHECK(mu.cell_mass[0] == doctest::Approx(0.625 / 1.5).epsilon(1e-14));
    CHECK(mu.cell_mass[1] == doctest::Approx(0.875 / 1.5).epsilon(1e-14));
  }

  TEST_CASE("measure invariants") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.2, 3.0);
    const Grid g = make_uniform_grid(-0.5, 2.0, 37);
    std::vector<double> dens(g.size());
    for (double& v : dens) v = d(rng);
    const auto mu = measure_from_density(g, dens);
    double mass = 0.0, weight = 0.0;
    for (double m : mu.cell_mass) {
      CHECK(m > 0.0);
      mass += m;
    }
    for (double w : mu.node_weight) {
      CHECK(w > 0.0);
      weight += w;
    }
    CHECK(std::abs(mass - 1.0) <= 1e-12);
    CHECK(std::abs(weight - mass) <= 1e-12);
  }

  TEST_CASE("nonpositive density is rejected") {
    const Grid g = make_uniform_grid(0.0, 1.0, 2);
    CHECK_THROWS_AS(measure_from_density(g, std::vector<double>{1.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(measure_from_density(g, std::vector<double>{1.0, -1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(measure_from_density(g, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  }

  TEST_CASE("cell derivative") {
    const Grid g = make_uniform_grid(0.0, 1.0, 2);
    const auto d = cell_derivative(g, std::vector<double>{0.0, 0.1, 1.0});
    CHECK(d[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(1.8).epsilon(1e-14));
    const auto zero = cell_derivative(g, std::vector<double>{3.0, 3.0, 3.0});
    CHECK(zero == std::vector<double>{0.0, 0.0});

    const Grid nonuniform({0.0, 0.013, 0.2, 0.21, 0.7, 1.0});
    const auto ones = cell_derivative(nonuniform, nonuniform.nodes());
    for (double v : ones) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(cell_derivative(g, std::vector<double>{1.0}), std::invalid_argument);
  }

  TEST_CASE("lumped quadrature is exact for affine functions under uniform mu") {
    const Grid g({0.0, 0.1, 0.35, 0.6, 1.0});
    const auto mu = uniform_measure(g);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 3.0 * g.node(i) - 0.7;
    // int_0^1 (3x - 0.7) dx = 0.8
    CHECK(std::abs(integrate(mu, f) - 0.8) <= 1e-12);
  }

  TEST_CASE("norms") {
    const Grid g = make_uniform_grid(0.0, 1.0, 4);
    const auto mu = uniform_measure(g);
    const std::vector<double> f{0.0, 1.0, -2.0, 1.0, 0.0};
    CHECK(sup_norm(f) == 2.0);
    CHECK(l2_norm(mu, f) == doctest::Approx(std::sqrt(0.25 * 6.0)).epsilon(1e-14));
    CHECK(l2_distance(mu, f, f) == 0.0);
    CHECK(sup_distance(f, std::vector<double>(5, 0.0)) == 2.0);
  }

  TEST_CASE("tridiagonal solver: hand cases") {
    TridiagonalSystem id{{1.0, 1.0, 1.0}, {0.0, 0.0}, {4.0, -2.0, 0.5}};
    CHECK(solve_tridiagonal_spd(id) == id.rhs);
    TridiagonalSystem two{{2.0, 2.0}, {-1.0}, {1.0, 1.0}};
    const auto x = solve_tridiagonal_spd(two);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("tridiagonal solver matches dense elimination on random SPD systems") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> size(1, 200);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const auto m = static_cast<std::size_t>(size(rng));
      TridiagonalSystem sys;
      sys.off.resize(m - 1);
      for (double& o : sys.off) o = u(rng);
      sys.diag.resize(m);
      // Strict diagonal dominance with positive diagonal makes the system SPD.
      for (std::size_t i = 0; i < m; ++i) {
        const double left = i > 0 ? std::abs(sys.off[i - 1]) : 0.0;
        const double right = i + 1 < m ? std::abs(sys.off[i]) : 0.0;
        sys.diag[i] = left + right + 0.01 + std::abs(u(rng));
      }
      sys.rhs.resize(m);
      for (double& r : sys.rhs) r = u(rng);
      const auto x = solve_tridiagonal_spd(sys);
      const auto ref = oracle::dense_solve(oracle::dense(sys), sys.rhs);
      CHECK(sup_distance(x, ref) <= 1e-10 * std::max(1.0, sup_norm(ref)));
      const auto ax = sys.apply(x);
      CHECK(sup_distance(ax, sys.rhs) <= 1e-10 * std::max(1.0, sup_norm(sys.rhs)));
    }
  }

  TEST_CASE("tridiagonal solver rejects indefinite systems") {
    TridiagonalSystem bad{{1.0, 1.0}, {2.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(solve_tridiagonal_spd(bad), NumericalError);
  }
}
