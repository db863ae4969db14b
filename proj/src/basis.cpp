#include "periparab/basis.hpp"

#include <cmath>
#include <string>

namespace periparab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

SpatialGrid SpatialGrid::uniform(double length, int n_nodes) {
  require(std::isfinite(length) && length > 0.0,
          "grid length must be positive and finite");
  require(n_nodes >= 3, "grid needs at least 3 nodes");
  SpatialGrid grid;
  grid.length = length;
  grid.n_nodes = n_nodes;
  grid.nodes.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    grid.nodes[i] = length * static_cast<double>(i) / (n_nodes - 1);
  }
  grid.nodes[n_nodes - 1] = length;
  const double h = grid.spacing();
  grid.quad_weights = Eigen::VectorXd::Constant(n_nodes, h);
  grid.quad_weights[0] = 0.5 * h;
  grid.quad_weights[n_nodes - 1] = 0.5 * h;
  return grid;
}

double quad_inner(const SpatialGrid& grid, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& v) {
  require(u.size() == grid.n_nodes && v.size() == grid.n_nodes,
          "quad_inner: vectors must be sampled on the grid nodes");
  return (grid.quad_weights.array() * u.array() * v.array()).sum();
}

OperatorSpec OperatorSpec::constants(const SpatialGrid& grid, double a,
                                     double b, double c) {
  OperatorSpec op;
  op.a = Eigen::VectorXd::Constant(grid.n_nodes, a);
  op.b = Eigen::VectorXd::Constant(grid.n_nodes, b);
  op.c = Eigen::VectorXd::Constant(grid.n_nodes, c);
  return op;
}

void OperatorSpec::validate(const SpatialGrid& grid) const {
  require(a.size() == grid.n_nodes && b.size() == grid.n_nodes &&
              c.size() == grid.n_nodes,
          "operator coefficients must be sampled on the grid nodes");
  require(a.allFinite() && b.allFinite() && c.allFinite(),
          "operator coefficients must be finite");
  require(std::isfinite(lambda_floor) && lambda_floor > 0.0,
          "ellipticity floor must be positive");
  require(a.minCoeff() >= lambda_floor,
          "ellipticity violated: min a(x) is below the floor");
}

EigenBasis dirichlet_laplacian_basis(int n_modes, const SpatialGrid& grid) {
  require(n_modes >= 1, "n_modes must be at least 1");
  // Phase increment of mode k per grid step is k*pi*h/length; demand at most
  // pi/2 (four nodes per wavelength) for every requested mode.
  require(2 * n_modes <= grid.n_nodes - 1,
          "mode " + std::to_string(n_modes) +
              " is under-resolved on this grid (needs at least 4 nodes per "
              "wavelength)");
  EigenBasis basis;
  basis.grid = grid;
  basis.n_modes = n_modes;
  basis.lambdas.resize(n_modes);
  basis.modes.resize(grid.n_nodes, n_modes);
  const double scale = std::sqrt(2.0 / grid.length);
  for (int k = 1; k <= n_modes; ++k) {
    const double wavenumber = k * M_PI / grid.length;
    basis.lambdas[k - 1] = wavenumber * wavenumber;
    for (int i = 0; i < grid.n_nodes; ++i) {
      basis.modes(i, k - 1) = scale * std::sin(wavenumber * grid.nodes[i]);
    }
    basis.modes(0, k - 1) = 0.0;
    basis.modes(grid.n_nodes - 1, k - 1) = 0.0;
  }
  return basis;
}

Eigen::MatrixXd operator_matrix(const OperatorSpec& op,
                                const SpatialGrid& grid) {
  op.validate(grid);
  const int m = grid.n_nodes - 2;
  const double h = grid.spacing();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const int node = i + 1;
    const double a_left = 0.5 * (op.a[node - 1] + op.a[node]);
    const double a_right = 0.5 * (op.a[node] + op.a[node + 1]);
    const double b_prime = (op.b[node + 1] - op.b[node - 1]) / (2.0 * h);
    mat(i, i) = (a_left + a_right) / (h * h) + op.c[node] - b_prime;
    if (i > 0) mat(i, i - 1) = -a_left / (h * h);
    if (i + 1 < m) mat(i, i + 1) = -a_right / (h * h);
  }
  return mat;
}

EigenBasis solve_operator_eigenproblem(const OperatorSpec& op,
                                       const SpatialGrid& grid, int n_modes) {
  require(n_modes >= 1, "n_modes must be at least 1");
  require(n_modes <= grid.n_nodes - 2,
          "n_modes cannot exceed the number of interior nodes");
  const Eigen::MatrixXd mat = operator_matrix(op, grid);
  const double scale = mat.cwiseAbs().maxCoeff();
  const double asym = (mat - mat.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * std::max(scale, 1.0))) {
    throw Error("discretized operator lost symmetry");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
  if (solver.info() != Eigen::Success) {
    throw Error("eigendecomposition failed to converge");
  }

  EigenBasis basis;
  basis.grid = grid;
  basis.n_modes = n_modes;
  basis.lambdas = solver.eigenvalues().head(n_modes);
  basis.modes = Eigen::MatrixXd::Zero(grid.n_nodes, n_modes);
  for (int j = 0; j < n_modes; ++j) {
    Eigen::VectorXd mode = Eigen::VectorXd::Zero(grid.n_nodes);
    mode.segment(1, grid.n_nodes - 2) = solver.eigenvectors().col(j);
    const double norm = std::sqrt(quad_inner(grid, mode, mode));
    mode /= norm;
    // Deterministic sign convention: first entry of substantial magnitude
    // is positive.
    const double max_abs = mode.cwiseAbs().maxCoeff();
    for (int i = 1; i + 1 < grid.n_nodes; ++i) {
      if (std::abs(mode[i]) > 0.5 * max_abs) {
        if (mode[i] < 0.0) mode = -mode;
        break;
      }
    }
    basis.modes.col(j) = mode;
  }
  return basis;
}

Eigen::VectorXd project(const Eigen::VectorXd& samples,
                        const EigenBasis& basis) {
  require(samples.size() == basis.grid.n_nodes,
          "project: samples must live on the basis grid nodes");
  return basis.modes.transpose() *
         basis.grid.quad_weights.cwiseProduct(samples);
}

Eigen::VectorXd synthesize(const Eigen::VectorXd& coefficients,
                           const EigenBasis& basis) {
  require(coefficients.size() <= basis.n_modes,
          "synthesize: more coefficients than basis modes");
  return basis.modes.leftCols(coefficients.size()) * coefficients;
}

double lq_norm(const Eigen::VectorXd& slice, double q,
               const SpatialGrid& grid) {
  require(std::isfinite(q) && q >= 1.5,
          "lq_norm requires a finite exponent q >= 3/2");
  require(slice.size() == grid.n_nodes,
          "lq_norm: slice must live on the grid nodes");
  const double sum =
      (grid.quad_weights.array() * slice.array().abs().pow(q)).sum();
  return std::pow(sum, 1.0 / q);
}

}  // namespace periparab
