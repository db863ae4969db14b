#pragma once

#include <Eigen/Dense>

#include "periparab/errors.hpp"

namespace periparab {

/// Uniform grid on the interval (0, length) with composite trapezoid
/// quadrature weights. Immutable after construction.
struct SpatialGrid {
  double length = 0.0;
  int n_nodes = 0;
  Eigen::VectorXd nodes;         ///< ascending, nodes[0]=0, nodes[last]=length
  Eigen::VectorXd quad_weights;  ///< trapezoid weights, sum = length

  /// Builds a uniform grid; throws ValidationError for length <= 0 or
  /// n_nodes < 3.
  static SpatialGrid uniform(double length, int n_nodes);

  [[nodiscard]] double spacing() const { return length / (n_nodes - 1); }
};

/// Discrete quadrature inner product sum_i w_i u_i v_i on grid nodes.
[[nodiscard]] double quad_inner(const SpatialGrid& grid,
                                const Eigen::VectorXd& u,
                                const Eigen::VectorXd& v);

/// Coefficients of the elliptic operator -(a u')' + b u' - (b u)' + c u,
/// sampled on grid nodes. In one dimension the drift terms reduce to the
/// potential correction -b', so the operator acts as -(a u')' + (c - b') u.
struct OperatorSpec {
  Eigen::VectorXd a;  ///< diffusion coefficient, must stay >= lambda_floor
  Eigen::VectorXd b;  ///< drift coefficient
  Eigen::VectorXd c;  ///< potential
  double lambda_floor = 1e-10;  ///< ellipticity floor for a(x)

  /// Constant-coefficient operator sampled on the given grid.
  static OperatorSpec constants(const SpatialGrid& grid, double a, double b,
                               double c);

  /// Throws ValidationError on size mismatch, non-finite samples, or
  /// ellipticity violation min a(x) < lambda_floor.
  void validate(const SpatialGrid& grid) const;
};

/// Orthonormal Dirichlet eigenpairs (lambda_j, X_j). Mode samples include the
/// boundary nodes, which are exactly zero. Immutable after construction.
struct EigenBasis {
  Eigen::VectorXd lambdas;  ///< ascending eigenvalues
  Eigen::MatrixXd modes;    ///< n_nodes x n_modes, column j = X_j
  int n_modes = 0;
  SpatialGrid grid;
};

/// Analytic Dirichlet Laplacian basis on (0, length):
/// lambda_k = (k pi / length)^2, X_k = sqrt(2/length) sin(k pi x / length).
/// Throws ValidationError when the last requested mode would be sampled with
/// fewer than four nodes per wavelength (phase increment above pi/2).
[[nodiscard]] EigenBasis dirichlet_laplacian_basis(int n_modes,
                                                   const SpatialGrid& grid);

/// Interior symmetric finite-difference matrix of -(a u')' + (c - b') u,
/// size (n_nodes-2)^2, with a averaged arithmetically at half nodes and b'
/// formed by central differences. Exposed for diagnostics and tests.
[[nodiscard]] Eigen::MatrixXd operator_matrix(const OperatorSpec& op,
                                              const SpatialGrid& grid);

/// First n_modes eigenpairs of the discretized operator, eigenvectors
/// extended by zero to the boundary and orthonormalized in the quadrature
/// inner product, eigenvalues ascending (negative eigenvalues permitted).
[[nodiscard]] EigenBasis solve_operator_eigenproblem(const OperatorSpec& op,
                                                     const SpatialGrid& grid,
                                                     int n_modes);

/// Quadrature projection coefficients <samples, X_j> for every basis mode.
[[nodiscard]] Eigen::VectorXd project(const Eigen::VectorXd& samples,
                                      const EigenBasis& basis);

/// Pointwise sum sum_j coefficients_j X_j on the grid nodes. Accepts
/// coefficient vectors no longer than basis.n_modes.
[[nodiscard]] Eigen::VectorXd synthesize(const Eigen::VectorXd& coefficients,
                                         const EigenBasis& basis);

/// Discrete L^q norm (sum_i w_i |slice_i|^q)^(1/q). Requires q >= 3/2.
[[nodiscard]] double lq_norm(const Eigen::VectorXd& slice, double q,
                             const SpatialGrid& grid);

}  // namespace periparab
