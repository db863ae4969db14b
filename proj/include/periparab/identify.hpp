#pragma once

#include <optional>
#include <vector>

#include "periparab/analysis.hpp"

namespace periparab {

/// Contiguous spatial observation window: the solution is observed on the
/// selected grid nodes over the whole period.
struct ObservationWindow {
  std::vector<bool> x_mask;  ///< one flag per grid node

  static ObservationWindow full(const SpatialGrid& grid);
  /// Selects node indices lo..hi inclusive.
  static ObservationWindow interval(const SpatialGrid& grid, int lo, int hi);

  /// Throws ValidationError unless the mask matches the grid, the selection
  /// is contiguous, and at least 3 interior nodes are selected.
  void validate(const SpatialGrid& grid) const;

  [[nodiscard]] std::vector<int> selected() const;
};

/// Data of the inverse problem: recover the zeroth-order coefficient and the
/// head initial values from observations of the solution on a subdomain.
struct IdentificationProblem {
  EigenBasis basis;
  TimeGrid time_grid;
  Forcing f;
  SplitIndex split;
  ObservationWindow window;
  Eigen::MatrixXd target;  ///< observed field, selected nodes x time nodes
  double q = 2.0;
  double bound_M = 1.0;
  int n_ex = 5;  ///< coefficient parameter nodes along x
  int n_et = 5;  ///< coefficient parameter nodes along t

  void validate() const;
};

/// Exact least-squares solve for the head coefficients at a fixed
/// coefficient e, with the Gram system exposed for diagnostics.
struct HeadSolve {
  Eigen::VectorXd a_star;
  double gram_min_eig = 0.0;
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
};

struct IdentifyConfig {
  double step_size = 1.0;   ///< initial descent step; later steps adapt freely
  int max_outer = 60;       ///< outer alternating iterations
  double fd_step = 1e-4;    ///< central-difference step on e parameters
  double tol = 1e-12;       ///< stop when the objective decrease drops below
  double step_floor = 1e-8;  ///< smallest backtracking step
  double tikhonov = 0.0;  ///< optional parameter penalty used during descent
  std::optional<Eigen::VectorXd> fixed_a;  ///< hold the head fixed if set
  Eigen::VectorXd initial_params;  ///< initial e parameters; empty = zeros
};

struct IdentificationResult {
  Perturbation e_star;
  Eigen::VectorXd params;      ///< final e parameters on the knot grid
  Eigen::VectorXd a_star;
  double objective = 0.0;      ///< data misfit at (e_star, a_star)
  double gram_min_eig = 0.0;   ///< from the final head solve; NaN if fixed
  int iterations = 0;
  std::vector<double> objective_history;  ///< one entry per outer iteration
};

/// Quadrature weights over the selected window nodes: trapezoid rule on the
/// window's own interval (half weight at its two end nodes).
[[nodiscard]] Eigen::VectorXd window_quad_weights(const ObservationWindow& window,
                                                  const SpatialGrid& grid);

/// Space-time misfit between the periodic solution for (e, a_I) and the
/// observation target, integrated over the window and the period. Throws
/// NonContractionError when the tail map norm reaches 1 and NearSingularError
/// when the periodicity system is ill-conditioned.
[[nodiscard]] double objective(const Perturbation& e, const Eigen::VectorXd& a_I,
                               const IdentificationProblem& prob);

/// Minimizes the misfit over the head coefficients at fixed e: one forced
/// base solve plus one homogeneous sensitivity solve per head mode, then a
/// dense normal-equation solve. Throws IllPosedObservationError when the
/// Gram matrix is numerically rank deficient.
[[nodiscard]] HeadSolve solve_head_given_e(const Perturbation& e,
                                           const IdentificationProblem& prob);

/// Rescales every time slice whose L^q norm exceeds bound_M back onto the
/// ball; admissible slices pass through unchanged, so the map is idempotent.
[[nodiscard]] Perturbation project_onto_mq(const Eigen::MatrixXd& values,
                                           double q, double bound_M,
                                           const SpatialGrid& grid);

/// Alternating minimization: an exact head solve followed by one projected
/// finite-difference descent step on the coefficient parameters per outer
/// iteration, accepting a step only when the objective decreases. Trial
/// evaluations that lose contraction (or blow up) are rejected and the step
/// halved; if every trial of a sweep down to the step floor is such a
/// rejection, ContractionBudgetError is thrown.
[[nodiscard]] IdentificationResult identify(const IdentificationProblem& prob,
                                            const IdentifyConfig& config = {});

namespace detail {
/// Piecewise-bilinear interpolation of an n_ex x n_et parameter table
/// (stored row-major: p[ix * n_et + it]) onto grid nodes x time nodes.
/// A single node along an axis means constant along that axis.
[[nodiscard]] Eigen::MatrixXd bilinear_interpolate(const Eigen::VectorXd& params,
                                                   int n_ex, int n_et,
                                                   const SpatialGrid& grid,
                                                   const TimeGrid& tg);
}  // namespace detail

}  // namespace periparab
