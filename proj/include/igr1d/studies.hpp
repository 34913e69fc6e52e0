#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "igr1d/dynamics.hpp"
#include "igr1d/scenarios.hpp"

namespace igr1d {

/// One alpha of the vanishing-regularization ladder, compared with the
/// sticky (alpha = 0) map.
struct GammaStudyRow {
  double alpha = 0.0;
  double sup_distance = 0.0;   // max_i |Phi_alpha - Phi_sticky|
  double l2mu_distance = 0.0;  // lumped L2(mu)
  double energy_gap = 0.0;     // F0(Phi_alpha) - F0(Phi_sticky), F0 with raw u0
  double min_derivative = 0.0;
  double raw_sup_distance = 0.0;  // sup distance between the raw- and regularized-data minimizers
};

struct GammaStudy {
  std::vector<GammaStudyRow> rows;
  MonotoneMap sticky;
  double min_energy = 0.0;             // F0 at the sticky map
  double mirrored_discrepancy = 0.0;   // sup distance, pinned vs mirrored sticky map
};

/// alphas must be strictly decreasing and positive. The minimizers use data
/// of the given mode; the energy gap always uses F0 with raw u0.
GammaStudy gamma_study(std::span<const double> u0, const DiscreteMeasure& mu, const Grid& grid, double t,
                       std::span<const double> alphas, const IgrParams& params, DataMode mode = DataMode::regularized,
                       Execution execution = Execution::serial);

struct StabilityStudy {
  double worst_ratio = 0.0;
  std::vector<double> ratios;  // one per pair, in sampling order
};

/// Worst ratio ||Phi^u - Phi^v||_{L2(mu)} / ||t (u - v)||_{L2(mu)} over seeded
/// random pairs of boundary-zero sine series (raw data). alpha = 0 uses the
/// sticky projection.
StabilityStudy stability_study(int pairs, std::uint64_t seed, const DiscreteMeasure& mu, const Grid& grid, double t,
                               double alpha, const IgrParams& params = {}, Execution execution = Execution::serial);

struct RefinementRow {
  std::size_t cells = 0;
  double delta = 0.0;
  double phi_dot_error = 0.0;   // sup |central difference of Phi - Phi_dot|
  double phi_ddot_error = 0.0;  // sup |second difference of Phi - Phi_ddot|
  double mass_residual = 0.0;
  double momentum_residual = 0.0;
  double budget_residual = 0.0;
  double mass_drift = 0.0;  // max over the three frames of |mass - 1|
  /// Empirical orders against the previous row, log(e_prev / e) / log(N / N_prev);
  /// nullopt on the first row or when either error is zero.
  std::optional<double> phi_dot_order, phi_ddot_order, mass_order, momentum_order, budget_order;
};

/// Frames at t - delta, t, t + delta for every (Ns[k], deltas[k]).
/// Ns strictly increasing, deltas positive with t - delta >= 0.
std::vector<RefinementRow> refinement_study(const Scenario& scenario, const IgrParams& params, double t,
                                            std::span<const std::size_t> Ns, std::span<const double> deltas,
                                            DataMode mode = DataMode::regularized);

/// log(previous / current) / log(refinement); nullopt if undefined.
std::optional<double> empirical_order(double previous, double current, double refinement);

}  // namespace igr1d
