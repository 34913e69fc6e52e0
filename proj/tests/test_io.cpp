#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "igr1d/io.hpp"
#include "oracles.hpp"

using namespace igr1d;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("igr1d_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("doubles survive formatting") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> exponent(-300.0, 300.0), mant(-1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const double v = mant(rng) * std::pow(10.0, exponent(rng));
      CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(std::nan("")) == "undefined");
    CHECK(std::isnan(parse_double("undefined")));
    CHECK(parse_double(format_double(std::numeric_limits<double>::infinity())) ==
          std::numeric_limits<double>::infinity());
    CHECK(parse_double(format_double(-0.0)) == 0.0);
    CHECK(parse_double(format_double(5e-324)) == 5e-324);
    CHECK_THROWS_AS(parse_double("1.0abc"), std::invalid_argument);
    CHECK(std::isnan(parse_double("")));
  }

  TEST_CASE("csv text round trip and column lookup") {
    Table t;
    t.columns = {"x [L]", "u [L/T]"};
    t.rows = {{0.1, std::nan("")}, {1.0 / 3.0, -2.5e-17}};
    const auto back = parse_csv(to_csv(t));
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == 2);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) CHECK(same(back.rows[r][c], t.rows[r][c]));
    }
    CHECK(back.column("u") == 1);
    CHECK(back.column("u [L/T]") == 1);
    CHECK_THROWS_AS(back.column("rho"), std::invalid_argument);
    CHECK(to_csv(t).rfind("x [L],u [L/T]\n", 0) == 0);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), std::invalid_argument);
  }

  TEST_CASE("tables round trip through files in both formats") {
    const auto dir = scratch_dir("tables");
    Table t;
    t.columns = {"alpha [L^2]", "value [1]"};
    t.rows = {{0.1, 1.0}, {0.05, std::nan("")}, {1e-300, -7.0}};
    for (auto fmt : {TableFormat::csv, TableFormat::json}) {
      const auto path = dir / (std::string("t") + extension(fmt));
      write_table(path, t, fmt);
      const auto back = read_table(path);
      CHECK(back.columns == t.columns);
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < 2; ++c) CHECK(same(back.rows[r][c], t.rows[r][c]));
      }
    }
    CHECK(table_format_from_string("json") == TableFormat::json);
    CHECK_THROWS_AS(table_format_from_string("xml"), std::invalid_argument);
    CHECK_THROWS(read_table(dir / "missing.csv"));
  }

  TEST_CASE("frame table round trip") {
    const auto sc = make_scenario("sinewave");
    const Grid g = sc.grid(50);
    IgrParams p;
    p.alpha = 1e-2;
    const auto frame = make_frame(make_regularized_data(sc.initial_velocity(g), g), 0.4, sc.measure(g), g, p);
    const auto table = frame_table(frame, g);
    CHECK(table.columns ==
          std::vector<std::string>{"x [L]", "phi [L]", "dphi_dx [1]", "phi_dot [L/T]", "phi_ddot [L/T^2]"});
    const auto back = frame_from_table(parse_csv(to_csv(table)), 0.4);
    CHECK(back.phi.values == frame.phi.values);
    CHECK(back.phi_dot == frame.phi_dot);
    CHECK(back.phi_ddot == frame.phi_ddot);
    CHECK(back.t == 0.4);
    const auto slopes = cell_derivative(g, frame.phi.values);
    CHECK(table.values("dphi_dx").back() == slopes.back());
    CHECK(table.values("dphi_dx").front() == slopes.front());
  }

  TEST_CASE("study tables round trip") {
    std::vector<ConservationRow> cons(3);
    for (std::size_t k = 0; k < cons.size(); ++k) {
      cons[k] = {0.1 * static_cast<double>(k), 1.0, 1e-17, 0.3 / 7.0, 0.25, 0.5, std::nullopt};
    }
    cons[1].budget_residual = 3e-9;
    const auto cons_back = conservation_from_table(parse_csv(to_csv(conservation_table(cons))));
    REQUIRE(cons_back.size() == 3);
    CHECK(cons_back[1].budget_residual == cons[1].budget_residual);
    CHECK_FALSE(cons_back[0].budget_residual.has_value());
    CHECK(cons_back[2].momentum == cons[2].momentum);

    std::vector<GammaStudyRow> gam{{0.1, 0.17, 0.08, 8.8e-3, 0.02, 1e-3}, {0.05, 0.15, 0.07, 5e-3, 0.01, 2e-3}};
    const auto gam_back = gamma_from_table(parse_csv(to_csv(gamma_table(gam))));
    REQUIRE(gam_back.size() == 2);
    CHECK(gam_back[1].sup_distance == gam[1].sup_distance);
    CHECK(gam_back[0].raw_sup_distance == gam[0].raw_sup_distance);

    RefinementRow r0;
    r0.cells = 64;
    r0.delta = 0.01;
    r0.phi_dot_error = 1e-5;
    RefinementRow r1 = r0;
    r1.cells = 128;
    r1.phi_dot_error = 2.5e-6;
    r1.phi_dot_order = 2.0;
    const auto ref_back = refinement_from_table(parse_csv(to_csv(refinement_table({r0, r1}))));
    REQUIRE(ref_back.size() == 2);
    CHECK(ref_back[1].cells == 128);
    CHECK(*ref_back[1].phi_dot_order == 2.0);
    CHECK_FALSE(ref_back[0].phi_dot_order.has_value());
    CHECK_FALSE(ref_back[1].mass_order.has_value());

    StabilityStudy st{0.9, {0.5, 0.9}};
    const auto st_table = stability_table(st);
    CHECK(st_table.values("ratio") == st.ratios);
    CHECK(st_table.values("pair") == std::vector<double>{0.0, 1.0});
  }

  TEST_CASE("solve report JSON round trip") {
    SolveReport r;
    r.method = SolveMethod::shooting;
    r.iterations = 7;
    r.final_grad_norm = 3.3e-11;
    r.objective = -0.123;
    r.min_cell_derivative = 0.01;
    r.max_cell_derivative = 3.0;
    r.derivative_lower_bound = 1e-3;
    r.density_floor = 0.2;
    r.shooting_constant = 1.7;
    r.gradient_floor = 1e-14;
    r.objective_history = {1.0, 0.5, 0.25};
    const auto dir = scratch_dir("report");
    write_json(dir / "r.json", to_json(r));
    const auto back = report_from_json(read_json(dir / "r.json"));
    CHECK(back.method == r.method);
    CHECK(back.iterations == r.iterations);
    CHECK(back.final_grad_norm == r.final_grad_norm);
    CHECK(back.objective == r.objective);
    CHECK(back.derivative_lower_bound == r.derivative_lower_bound);
    CHECK(back.gradient_floor == r.gradient_floor);
    CHECK(back.objective_history == r.objective_history);
  }
}
