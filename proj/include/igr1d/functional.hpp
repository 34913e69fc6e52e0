#pragma once

#include <optional>
#include <span>
#include <vector>

#include "igr1d/numerics.hpp"

namespace igr1d {

/// Deformation map sampled at grid nodes. values.front() == a, values.back() == b.
struct MonotoneMap {
  std::vector<double> values;

  static MonotoneMap identity(const Grid& grid);

  /// True when endpoints are pinned and every cell increment is > 0.
  bool strictly_increasing(const Grid& grid) const;
  bool nondecreasing(const Grid& grid) const;
};

enum class DataMode { raw, regularized };

const char* to_string(DataMode mode);
DataMode data_mode_from_string(const std::string& name);

/// Linear data functional f acting on maps through integration against mu.
///
/// raw:          f(Phi) = int Phi v dmu
/// regularized:  f(Phi) = int Phi u0 + alpha dPhi du0 dmu
struct LinearData {
  std::vector<double> node_values;  // v (raw) or u0 (regularized)
  std::vector<double> cell_slopes;  // du0 per cell; empty for raw data
  DataMode mode = DataMode::raw;
};

LinearData make_raw_data(std::span<const double> v);

/// Requires u0 to vanish at both walls.
LinearData make_regularized_data(std::span<const double> u0, const Grid& grid);

struct IgrParams {
  double alpha = 0.0;
  double newton_tol = 1e-10;  // sup-norm of the gradient
  int max_iter = 100;
  double fd_step = 1e-2;  // relative time step for finite-difference checks
};

/// Throws std::invalid_argument unless alpha > 0, newton_tol > 0, max_iter > 0.
void validate(const IgrParams& params);

/// Nodal representation g of the data functional: f(Phi) = sum_i g_i Phi_i.
/// Covers every node including the endpoints.
std::vector<double> nodal_forcing(const LinearData& data, double alpha, const DiscreteMeasure& mu,
                                  const Grid& grid);

/// f(Phi) for the given data.
double data_action(const LinearData& data, std::span<const double> phi, double alpha,
                   const DiscreteMeasure& mu, const Grid& grid);

/// Pointwise velocity that reproduces the data functional under the lumped
/// quadrature, g_i / (w_i mu_i). Equals v for raw data; for regularized data
/// it is the discrete u0 - (alpha/mu) d(mu du0).
std::vector<double> effective_velocity(const LinearData& data, double alpha, const DiscreteMeasure& mu,
                                       const Grid& grid);

/// Discrete IGR objective
///   sum_i W_i (Phi_i - x_i)^2 / 2 - alpha sum_c m_c log dPhi_c - t f(Phi).
/// std::nullopt stands for +infinity (some cell derivative <= 0).
std::optional<double> objective_hat(const MonotoneMap& phi, const LinearData& data, double t,
                                    const IgrParams& params, const DiscreteMeasure& mu, const Grid& grid);

/// Same objective with alpha = 0 (no barrier). Defined for any map.
double objective_nominal(std::span<const double> phi, const LinearData& data, double t,
                         const DiscreteMeasure& mu, const Grid& grid);

/// Gradient with respect to the N-1 interior nodes (Dirichlet endpoints).
/// Throws std::domain_error off the open monotone cone.
std::vector<double> gradient(const MonotoneMap& phi, const LinearData& data, double t,
                             const IgrParams& params, const DiscreteMeasure& mu, const Grid& grid);

/// Tridiagonal Hessian on the interior nodes: lumped mass plus stiffness with
/// cell coefficients alpha m_c / dPhi_c^2 / h_c^2. The rhs field is zero.
TridiagonalSystem hessian(const MonotoneMap& phi, const IgrParams& params, const DiscreteMeasure& mu,
                          const Grid& grid);

/// KL(Phi_# mu || mu). The reference mass of each image cell is the exact
/// integral of the interpolated density over that cell. nullopt means +infinity.
std::optional<double> kl_pushforward(const MonotoneMap& phi, const DiscreteMeasure& mu, const Grid& grid);

/// sum_c m_c (-log dPhi_c); the barrier term of the objective divided by alpha.
std::optional<double> log_barrier(const MonotoneMap& phi, const DiscreteMeasure& mu, const Grid& grid);

}  // namespace igr1d
