#pragma once

#include <vector>

#include "periparab/periodic.hpp"

namespace periparab {

/// Energy diagnostics of a computed solution: peak spatial L^2 norm, time
/// integral of the gradient norm, the squared data norm, and their ratio.
struct EnergyReport {
  double sup_l2_sq = 0.0;     ///< sup over time nodes of ||u(., t)||^2
  double grad_integral = 0.0;  ///< integral over (0, T) of ||du/dx(., t)||^2
  double data_norm_sq = 0.0;   ///< |a_I|^2 + space-time integral of f^2
  double ratio = 0.0;  ///< (sup_l2_sq + grad_integral)/data_norm_sq, 0 for zero data
};

/// Computes the energy diagnostics of a periodic solution. The spatial L^2
/// norm uses coefficient sums (the basis is orthonormal); the gradient is
/// formed by synthesizing each time slice on the grid and differencing in x
/// (central in the interior, one-sided at the boundary), then integrating by
/// quadrature in x and the trapezoid rule in t.
[[nodiscard]] EnergyReport energy_report(const PeriodicSolution& sol,
                                         const GalerkinSystem& sys,
                                         const Eigen::VectorXd& a_I,
                                         const Forcing& f);

/// Samples the represented field u(x_i, t_j) = sum_k u_k(t_j) X_k(x_i) at
/// the requested grid-node and stored-column indices. Throws ValidationError
/// for out-of-range indices.
[[nodiscard]] Eigen::MatrixXd evaluate_field(const SpectralTrajectory& traj,
                                             const std::vector<int>& x_indices,
                                             const std::vector<int>& t_indices);

namespace detail {
/// Trapezoid weights for the time grid: dt/2 at the end nodes, dt inside.
[[nodiscard]] Eigen::VectorXd time_trapezoid_weights(const TimeGrid& tg);

/// Finite-difference x-derivative of a sampled slice on a uniform grid.
[[nodiscard]] Eigen::VectorXd slice_derivative(const Eigen::VectorXd& slice,
                                               double spacing);
}  // namespace detail

}  // namespace periparab
