#include "periparab/galerkin.hpp"

#include <cmath>
#include <string>

#include "periparab/parallel.hpp"

namespace periparab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

TimeGrid TimeGrid::uniform(double horizon, int n_steps) {
  require(std::isfinite(horizon) && horizon > 0.0,
          "time horizon must be positive and finite");
  require(n_steps >= 1, "time grid needs at least one step");
  TimeGrid tg;
  tg.horizon = horizon;
  tg.n_steps = n_steps;
  tg.times.resize(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) {
    tg.times[i] = horizon * static_cast<double>(i) / n_steps;
  }
  tg.times[n_steps] = horizon;
  return tg;
}

Perturbation Perturbation::zero(const SpatialGrid& grid, const TimeGrid& tg,
                                double q, double bound_M) {
  Perturbation e;
  e.values = Eigen::MatrixXd::Zero(grid.n_nodes, tg.n_nodes());
  e.q = q;
  e.bound_M = bound_M;
  return e;
}

void Perturbation::validate(const SpatialGrid& grid, const TimeGrid& tg) const {
  require(values.rows() == grid.n_nodes && values.cols() == tg.n_nodes(),
          "perturbation must be sampled on grid nodes x time nodes");
  require(values.allFinite(), "perturbation samples must be finite");
  require(std::isfinite(bound_M) && bound_M > 0.0,
          "perturbation bound M must be positive");
  for (int i = 0; i < values.cols(); ++i) {
    const double norm = lq_norm(values.col(i), q, grid);
    require(norm <= bound_M + 1e-9,
            "perturbation leaves the admissible ball at time node " +
                std::to_string(i));
  }
}

Forcing Forcing::zero(const SpatialGrid& grid, const TimeGrid& tg) {
  Forcing f;
  f.values = Eigen::MatrixXd::Zero(grid.n_nodes, tg.n_nodes());
  return f;
}

void Forcing::validate(const SpatialGrid& grid, const TimeGrid& tg) const {
  require(values.rows() == grid.n_nodes && values.cols() == tg.n_nodes(),
          "forcing must be sampled on grid nodes x time nodes");
  require(values.allFinite(), "forcing samples must be finite");
}

GalerkinSystem assemble(const EigenBasis& basis, const Perturbation& e,
                        const Forcing& f, const TimeGrid& tg) {
  e.validate(basis.grid, tg);
  f.validate(basis.grid, tg);
  const int n = basis.n_modes;
  const int n_time = tg.n_nodes();

  GalerkinSystem sys;
  sys.basis = std::make_shared<EigenBasis>(basis);
  sys.time_grid = tg;
  sys.coupling.assign(n_time, Eigen::MatrixXd());
  sys.forcing_coeffs.resize(n, n_time);

  const Eigen::MatrixXd& modes = basis.modes;
  const Eigen::VectorXd& w = basis.grid.quad_weights;
  parallel_for(0, n_time, [&](std::ptrdiff_t i) {
    const Eigen::VectorXd weighted = w.cwiseProduct(e.values.col(i));
    Eigen::MatrixXd block =
        modes.transpose() * (weighted.asDiagonal() * modes);
    block = 0.5 * (block + block.transpose()).eval();
    block.diagonal() += basis.lambdas;
    sys.coupling[i] = std::move(block);
    sys.forcing_coeffs.col(i) =
        modes.transpose() * w.cwiseProduct(f.values.col(i));
  });
  return sys;
}

namespace detail {

SpectralTrajectory propagate_span(const GalerkinSystem& sys,
                                  const Eigen::VectorXd& initial,
                                  int node_begin, int node_end,
                                  bool use_forcing) {
  const int n = sys.n_modes();
  const int last = sys.time_grid.n_steps;
  if (node_end < 0) node_end = last;
  require(initial.size() == n, "initial vector must have one entry per mode");
  require(initial.allFinite(), "initial vector must be finite");
  require(node_begin >= 0 && node_end <= last && node_begin <= node_end,
          "propagation span must lie on the time grid");

  const double dt = sys.time_grid.dt();
  const Eigen::VectorXd& lambdas = sys.basis->lambdas;
  const Eigen::VectorXd half_decay =
      (-0.5 * dt * lambdas.array()).exp().matrix();

  SpectralTrajectory traj;
  traj.basis = sys.basis;
  traj.time_grid = sys.time_grid;
  traj.span_begin = node_begin;
  traj.coeffs.resize(n, node_end - node_begin + 1);
  traj.coeffs.col(0) = initial;

  Eigen::VectorXd u = initial;
  Eigen::VectorXd k1(n), uh(n), k2(n);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for (int i = node_begin; i < node_end; ++i) {
    const Eigen::MatrixXd& b0 = sys.coupling[i];
    const Eigen::MatrixXd& b1 = sys.coupling[i + 1];
    const Eigen::VectorXd& f0 =
        use_forcing ? sys.forcing_coeffs.col(i) : static_cast<const Eigen::VectorXd&>(zero);
    const Eigen::VectorXd& f1 =
        use_forcing ? sys.forcing_coeffs.col(i + 1) : static_cast<const Eigen::VectorXd&>(zero);

    u = half_decay.cwiseProduct(u);
    // Midpoint substep for u' = -E(t)^T u + f(t); the action of E^T is
    // B^T u minus the diagonal part.
    k1 = f0 - b0.transpose() * u + lambdas.cwiseProduct(u);
    uh = u + (0.5 * dt) * k1;
    k2 = 0.5 * (f0 + f1) -
         0.5 * ((b0.transpose() * uh) + (b1.transpose() * uh)) +
         lambdas.cwiseProduct(uh);
    u += dt * k2;
    u = half_decay.cwiseProduct(u);

    if (!u.allFinite()) {
      throw IntegrationFailure(
          "propagation produced a non-finite state at time node " +
              std::to_string(i + 1),
          i + 1);
    }
    traj.coeffs.col(i + 1 - node_begin) = u;
  }
  return traj;
}

}  // namespace detail

SpectralTrajectory propagate(const GalerkinSystem& sys,
                             const Eigen::VectorXd& initial, int node_begin,
                             int node_end) {
  return detail::propagate_span(sys, initial, node_begin, node_end, true);
}

}  // namespace periparab
