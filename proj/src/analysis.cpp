#include "periparab/analysis.hpp"

#include <string>

namespace periparab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

namespace detail {

Eigen::VectorXd time_trapezoid_weights(const TimeGrid& tg) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(tg.n_nodes(), tg.dt());
  w[0] *= 0.5;
  w[tg.n_steps] *= 0.5;
  return w;
}

Eigen::VectorXd slice_derivative(const Eigen::VectorXd& slice,
                                 double spacing) {
  const int n = static_cast<int>(slice.size());
  Eigen::VectorXd d(n);
  d[0] = (slice[1] - slice[0]) / spacing;
  for (int r = 1; r < n - 1; ++r) {
    d[r] = (slice[r + 1] - slice[r - 1]) / (2.0 * spacing);
  }
  d[n - 1] = (slice[n - 1] - slice[n - 2]) / spacing;
  return d;
}

}  // namespace detail

EnergyReport energy_report(const PeriodicSolution& sol,
                           const GalerkinSystem& sys,
                           const Eigen::VectorXd& a_I, const Forcing& f) {
  const SpectralTrajectory& traj = sol.trajectory;
  require(traj.basis != nullptr && sys.basis != nullptr,
          "solution and system must carry a basis");
  require(traj.coeffs.rows() == sys.n_modes(),
          "solution and system must agree on the mode count");
  require(traj.n_columns() == sys.time_grid.n_nodes(),
          "solution must span the full time grid");
  require(a_I.size() == sol.head.size(),
          "head vector must match the solution's head");
  const SpatialGrid& grid = sys.basis->grid;
  f.validate(grid, sys.time_grid);

  EnergyReport report;
  const Eigen::VectorXd tw = detail::time_trapezoid_weights(sys.time_grid);
  const double h = grid.spacing();

  for (int i = 0; i < traj.n_columns(); ++i) {
    report.sup_l2_sq =
        std::max(report.sup_l2_sq, traj.coeffs.col(i).squaredNorm());
    const Eigen::VectorXd slice =
        synthesize(traj.coeffs.col(i), *traj.basis);
    const Eigen::VectorXd d = detail::slice_derivative(slice, h);
    report.grad_integral +=
        tw[i] * grid.quad_weights.dot(d.cwiseAbs2());
    report.data_norm_sq +=
        tw[i] * grid.quad_weights.dot(f.values.col(i).cwiseAbs2());
  }
  report.data_norm_sq += a_I.squaredNorm();
  report.ratio = report.data_norm_sq > 0.0
                     ? (report.sup_l2_sq + report.grad_integral) /
                           report.data_norm_sq
                     : 0.0;
  return report;
}

Eigen::MatrixXd evaluate_field(const SpectralTrajectory& traj,
                               const std::vector<int>& x_indices,
                               const std::vector<int>& t_indices) {
  require(traj.basis != nullptr, "trajectory must carry a basis");
  const int n_nodes = traj.basis->grid.n_nodes;
  const int n_cols = traj.n_columns();
  for (int xi : x_indices) {
    require(xi >= 0 && xi < n_nodes, "x index out of range");
  }
  for (int ti : t_indices) {
    require(ti >= 0 && ti < n_cols, "time index out of range");
  }

  Eigen::MatrixXd rows(static_cast<int>(x_indices.size()),
                       traj.basis->n_modes);
  for (std::size_t i = 0; i < x_indices.size(); ++i) {
    rows.row(static_cast<int>(i)) = traj.basis->modes.row(x_indices[i]);
  }
  Eigen::MatrixXd cols(traj.coeffs.rows(),
                       static_cast<int>(t_indices.size()));
  for (std::size_t j = 0; j < t_indices.size(); ++j) {
    cols.col(static_cast<int>(j)) = traj.coeffs.col(t_indices[j]);
  }
  return rows * cols;
}

}  // namespace periparab
