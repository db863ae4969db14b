#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "periparab/basis.hpp"

namespace periparab {

/// Uniform time grid on [0, horizon] with n_steps steps (n_steps + 1 nodes).
struct TimeGrid {
  double horizon = 0.0;
  int n_steps = 0;
  Eigen::VectorXd times;

  static TimeGrid uniform(double horizon, int n_steps);

  [[nodiscard]] double dt() const { return horizon / n_steps; }
  [[nodiscard]] int n_nodes() const { return n_steps + 1; }
};

/// Zeroth-order coefficient e(x, t) sampled on grid nodes x time nodes,
/// constrained to the ball sup_t ||e(., t)||_{L^q} <= bound_M.
struct Perturbation {
  Eigen::MatrixXd values;  ///< n_nodes x n_time_nodes
  double q = 2.0;
  double bound_M = 1.0;

  /// All-zero perturbation of matching dimensions.
  static Perturbation zero(const SpatialGrid& grid, const TimeGrid& tg,
                           double q = 2.0, double bound_M = 1.0);

  /// Throws ValidationError on dimension mismatch, non-finite entries, or a
  /// time slice whose L^q norm exceeds bound_M + 1e-9.
  void validate(const SpatialGrid& grid, const TimeGrid& tg) const;
};

/// Source term f(x, t) sampled on grid nodes x time nodes.
struct Forcing {
  Eigen::MatrixXd values;  ///< n_nodes x n_time_nodes

  static Forcing zero(const SpatialGrid& grid, const TimeGrid& tg);

  void validate(const SpatialGrid& grid, const TimeGrid& tg) const;
};

using BasisRef = std::shared_ptr<const EigenBasis>;

/// Truncated ODE system du_j/dt + sum_k B_kj(t) u_k = f_j(t) sampled on the
/// time grid: coupling[i] = diag(lambda) + E(t_i) with
/// E_kj = <e(., t_i) X_k, X_j>, forcing_coeffs(:, i) = projection of f(., t_i).
struct GalerkinSystem {
  std::vector<Eigen::MatrixXd> coupling;  ///< one N x N matrix per time node
  Eigen::MatrixXd forcing_coeffs;         ///< N x n_time_nodes
  BasisRef basis;
  TimeGrid time_grid;

  [[nodiscard]] int n_modes() const { return basis->n_modes; }
};

/// Spectral coefficients u_j(t_i); column c holds the coefficients at time
/// node span_begin + c. The represented field is sum_j u_j(t) X_j(x).
struct SpectralTrajectory {
  Eigen::MatrixXd coeffs;  ///< N x n_columns
  BasisRef basis;
  TimeGrid time_grid;
  int span_begin = 0;

  [[nodiscard]] int n_columns() const {
    return static_cast<int>(coeffs.cols());
  }
};

/// Builds the Galerkin system for the given basis, perturbation, and forcing.
/// Validates dimensions and the M_q membership of e. The perturbation block
/// of every coupling matrix is symmetric by construction.
[[nodiscard]] GalerkinSystem assemble(const EigenBasis& basis,
                                      const Perturbation& e, const Forcing& f,
                                      const TimeGrid& tg);

/// Propagates u' = -B(t)^T u + f(t) from time node node_begin to node_end
/// (defaults: the full grid). The stiff diagonal part is advanced by exact
/// exponentials; the coupling and forcing by an explicit midpoint rule with
/// piecewise-linear data in t (second order overall). Throws
/// IntegrationFailure carrying the time node if the state leaves the finite
/// range.
[[nodiscard]] SpectralTrajectory propagate(const GalerkinSystem& sys,
                                           const Eigen::VectorXd& initial,
                                           int node_begin = 0,
                                           int node_end = -1);

namespace detail {
/// Propagation core shared with the periodic-solver module; when use_forcing
/// is false the forcing coefficients are treated as zero.
SpectralTrajectory propagate_span(const GalerkinSystem& sys,
                                  const Eigen::VectorXd& initial,
                                  int node_begin, int node_end,
                                  bool use_forcing);
}  // namespace detail

}  // namespace periparab
