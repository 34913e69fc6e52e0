#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "igr1d/numerics.hpp"

namespace igr1d {

/// Initial value problem preset: domain, initial density and velocity.
struct Scenario {
  std::string name;
  double a = 0.0;
  double b = 1.0;
  std::function<double(double)> density;   // unnormalized, positive
  std::function<double(double)> velocity;  // vanishes at a and b
  double shock_time = 0.0;                 // 1 / max(-du0/dx); +inf when no compression

  Grid grid(std::size_t cells) const { return make_uniform_grid(a, b, cells); }
  DiscreteMeasure measure(const Grid& g) const;
  /// u0 at the nodes with the wall values forced to exactly 0.
  std::vector<double> initial_velocity(const Grid& g) const;
};

/// identity, sinewave, twoblock, randomfield on [a, b]. Throws
/// std::invalid_argument for other names or a >= b.
Scenario make_scenario(const std::string& name, std::uint64_t seed = 42, double a = 0.0, double b = 1.0);

std::vector<std::string> scenario_names();

/// One-line description per preset (for `igr1d scenarios`).
std::string describe_scenario(const std::string& name);

/// Boundary-zero truncated sine series sum_k c_k sin(k pi (x-a)/L) with
/// c_k uniform in [-1, 1] / k, k = 1..modes.
std::function<double(double)> random_sine_series(std::uint64_t seed, double a, double b, int modes = 6,
                                                 double amplitude = 1.0);

/// Time scale for t ladders: the shock time when finite, otherwise
/// (b - a) / max|u0|, otherwise 1 (u0 = 0).
double characteristic_time(const Scenario& scenario);

/// 1 / max(-du0/dx) estimated on a fine sampling; +inf if u0 is nondecreasing.
double estimate_shock_time(const std::function<double(double)>& u0, double a, double b);

}  // namespace igr1d
