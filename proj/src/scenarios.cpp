#include "igr1d/scenarios.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace igr1d {

DiscreteMeasure Scenario::measure(const Grid& g) const {
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = density(g.node(i));
  return measure_from_density(g, d);
}

std::vector<double> Scenario::initial_velocity(const Grid& g) const {
  std::vector<double> u(g.size());
  for (std::size_t i = 1; i + 1 < g.size(); ++i) u[i] = velocity(g.node(i));
  u.front() = 0.0;
  u.back() = 0.0;
  return u;
}

std::function<double(double)> random_sine_series(std::uint64_t seed, double a, double b, int modes,
                                                 double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coefficient(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(modes));
  for (int k = 1; k <= modes; ++k) c[static_cast<std::size_t>(k - 1)] = amplitude * coefficient(rng) / k;
  const double length = b - a;
  return [c, a, length](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      s += c[k] * std::sin(static_cast<double>(k + 1) * std::numbers::pi * (x - a) / length);
    }
    return s;
  };
}

double estimate_shock_time(const std::function<double(double)>& u0, double a, double b) {
  constexpr int samples = 20000;
  const double h = (b - a) / samples;
  double steepest = 0.0;
  double prev = u0(a);
  for (int i = 1; i <= samples; ++i) {
    const double cur = u0(a + h * i);
    steepest = std::max(steepest, -(cur - prev) / h);
    prev = cur;
  }
  return steepest > 0.0 ? 1.0 / steepest : std::numeric_limits<double>::infinity();
}

double characteristic_time(const Scenario& scenario) {
  if (std::isfinite(scenario.shock_time)) return scenario.shock_time;
  constexpr int samples = 20000;
  double peak = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = scenario.a + (scenario.b - scenario.a) * i / samples;
    peak = std::max(peak, std::abs(scenario.velocity(x)));
  }
  return peak > 0.0 ? (scenario.b - scenario.a) / peak : 1.0;
}

std::vector<std::string> scenario_names() { return {"identity", "sinewave", "twoblock", "randomfield"}; }

std::string describe_scenario(const std::string& name) {
  if (name == "identity") return "u0 = 0, uniform density; the map stays the identity";
  if (name == "sinewave") return "u0 = sin(pi (x-a)/L), uniform density; compression against the right wall";
  if (name == "twoblock") {
    return "u0 = -tanh((x-m)/0.1) sin(pi (x-a)/L), uniform density; smoothed streams colliding at the midpoint";
  }
  if (name == "randomfield") return "seeded 6-mode sine series, density 1 + 0.3 sin(pi (x-a)/L)";
  throw std::invalid_argument("unknown scenario: " + name);
}

Scenario make_scenario(const std::string& name, std::uint64_t seed, double a_, double b_) {
  if (!(a_ < b_)) throw std::invalid_argument("scenario domain needs a < b");
  Scenario s;
  s.name = name;
  s.a = a_;
  s.b = b_;
  const double a = s.a;
  const double length = s.b - s.a;
  const double pi = std::numbers::pi;
  auto uniform = [](double) { return 1.0; };

  if (name == "identity") {
    s.density = uniform;
    s.velocity = [](double) { return 0.0; };
  } else if (name == "sinewave") {
    s.density = uniform;
    s.velocity = [=](double x) { return std::sin(pi * (x - a) / length); };
  } else if (name == "twoblock") {
    const double mid = 0.5 * (s.a + s.b);
    s.density = uniform;
    s.velocity = [=](double x) { return -std::tanh((x - mid) / 0.1) * std::sin(pi * (x - a) / length); };
  } else if (name == "randomfield") {
    s.density = [=](double x) { return 1.0 + 0.3 * std::sin(pi * (x - a) / length); };
    s.velocity = random_sine_series(seed, s.a, s.b);
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  s.shock_time = estimate_shock_time(s.velocity, s.a, s.b);
  return s;
}

}  // namespace igr1d
