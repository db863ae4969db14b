#include "periparab/periodic.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "periparab/parallel.hpp"

namespace periparab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Tail of the terminal column of one propagation from the given initial
/// state; homogeneous or forced.
Eigen::VectorXd tail_at_period(const GalerkinSystem& sys,
                               const Eigen::VectorXd& initial,
                               const SplitIndex& split, bool use_forcing) {
  const SpectralTrajectory traj =
      detail::propagate_span(sys, initial, 0, -1, use_forcing);
  return traj.coeffs.col(traj.n_columns() - 1).tail(split.tail_size());
}

Eigen::VectorXd embed_tail(const Eigen::VectorXd& head,
                           const Eigen::VectorXd& tail,
                           const SplitIndex& split) {
  Eigen::VectorXd full(split.n);
  full.head(split.k) = head;
  full.tail(split.tail_size()) = tail;
  return full;
}

}  // namespace

void SplitIndex::validate(const GalerkinSystem& sys) const {
  require(n == sys.n_modes(),
          "split truncation must match the system's mode count");
  require(k >= 0 && k < n, "split head size must satisfy 0 <= k < n");
}

namespace detail {

Eigen::VectorXd symmetric_uniform(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd out(count);
  for (int i = 0; i < count; ++i) {
    const double unit =
        static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    out[i] = 2.0 * unit - 1.0;
  }
  return out;
}

Eigen::MatrixXd tail_monodromy_matrix(const GalerkinSystem& sys,
                                      const SplitIndex& split) {
  split.validate(sys);
  const int m = split.tail_size();
  Eigen::MatrixXd jmat(m, m);
  parallel_for(0, m, [&](std::ptrdiff_t j) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(split.n);
    unit[split.k + static_cast<int>(j)] = 1.0;
    jmat.col(j) = tail_at_period(sys, unit, split, false);
  });
  return jmat;
}

}  // namespace detail

ContractionEstimate tail_monodromy_norm(const GalerkinSystem& sys,
                                        const SplitIndex& split,
                                        std::uint64_t seed, int max_iter) {
  split.validate(sys);
  require(max_iter >= 1, "power iteration needs a positive step budget");
  const int m = split.tail_size();
  const Eigen::MatrixXd jmat = detail::tail_monodromy_matrix(sys, split);

  // For small tails form the normal matrix once; for large ones apply J and
  // J^T separately each step to avoid the m x m product.
  const bool use_normal_matrix = m <= 64;
  Eigen::MatrixXd normal;
  if (use_normal_matrix) normal = jmat.transpose() * jmat;

  ContractionEstimate est;
  est.split = split;

  Eigen::VectorXd v = detail::symmetric_uniform(seed, m);
  if (v.norm() == 0.0) v.setConstant(1.0);
  v.normalize();

  double rho_prev = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    est.iterations = it;
    const Eigen::VectorXd z =
        use_normal_matrix ? (normal * v).eval()
                          : (jmat.transpose() * (jmat * v)).eval();
    const double rho = v.dot(z);  // = |J v|^2 for unit v
    if (rho <= 0.0) {
      est.mu = 0.0;
      est.converged = true;
      return est;
    }
    if (rho_prev >= 0.0 && std::abs(rho - rho_prev) < 1e-8 * rho) {
      est.mu = std::sqrt(rho);
      est.converged = true;
      return est;
    }
    rho_prev = rho;
    const double zn = z.norm();
    if (zn == 0.0) {
      est.mu = 0.0;
      est.converged = true;
      return est;
    }
    v = z / zn;
  }
  est.mu = std::sqrt(rho_prev);
  est.converged = false;
  return est;
}

SplitIndex choose_k(const GalerkinSystem& sys, double mu_target, int k_max,
                    std::uint64_t seed) {
  require(mu_target > 0.0 && mu_target < 1.0,
          "contraction target must lie in (0, 1)");
  require(k_max >= 0, "split scan bound must be nonnegative");
  const int n = sys.n_modes();
  const int k_stop = std::min(k_max, n - 1);
  for (int k = 0; k <= k_stop; ++k) {
    const SplitIndex split{k, n};
    const ContractionEstimate est =
        tail_monodromy_norm(sys, split, seed, 200);
    if (est.converged && est.mu <= mu_target) return split;
  }
  throw CapacityError(
      "no head size up to " + std::to_string(k_stop) +
      " brings the tail map norm to " + std::to_string(mu_target) +
      "; increase the truncation dimension");
}

PeriodicSolution solve_fixed_point(const GalerkinSystem& sys,
                                   const Eigen::VectorXd& a_I,
                                   const SplitIndex& split, double tol,
                                   int max_iter,
                                   const std::optional<Eigen::VectorXd>& tail_init,
                                   std::optional<double> mu_hint,
                                   std::uint64_t seed) {
  split.validate(sys);
  require(a_I.size() == split.k, "head vector must have one entry per head mode");
  require(a_I.allFinite(), "head vector must be finite");
  require(std::isfinite(tol) && tol > 0.0, "tolerance must be positive");
  require(max_iter >= 1, "iteration budget must be positive");

  double mu;
  if (mu_hint.has_value()) {
    mu = *mu_hint;
    require(std::isfinite(mu) && mu >= 0.0,
            "supplied contraction norm must be nonnegative");
  } else {
    mu = tail_monodromy_norm(sys, split, seed, 200).mu;
  }
  if (mu >= 1.0) {
    throw NonContractionError("tail map norm " + std::to_string(mu) +
                              " is not below 1; refusing fixed-point iteration");
  }
  const double threshold =
      mu > 0.0 ? tol * (1.0 - mu) / mu
               : std::numeric_limits<double>::infinity();

  const int m = split.tail_size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  if (tail_init.has_value()) {
    require(tail_init->size() == m,
            "tail initializer must have one entry per tail mode");
    require(tail_init->allFinite(), "tail initializer must be finite");
    x = *tail_init;
  }

  PeriodicSolution sol;
  sol.method = PeriodicMethod::fixed_point;
  sol.mu_used = mu;
  sol.condition = kNaN;
  sol.tail_map_norm = kNaN;

  double first_step = -1.0;
  bool accepted = false;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd x_next =
        tail_at_period(sys, embed_tail(a_I, x, split), split, true);
    const double step = (x_next - x).norm();
    sol.step_norms.push_back(step);
    sol.iterations = it;
    x = x_next;
    if (step <= threshold) {
      accepted = true;
      break;
    }
    if (first_step < 0.0) {
      first_step = step;
    } else if (step > 2.0 * first_step) {
      throw NonContractionError(
          "fixed-point step norm grew from " + std::to_string(first_step) +
          " to " + std::to_string(step) + "; tail map is not contracting");
    }
  }
  if (!accepted) {
    throw ToleranceNotMetError(
        "fixed-point iteration did not reach the requested tolerance in " +
            std::to_string(max_iter) + " steps",
        std::vector<double>(x.data(), x.data() + x.size()),
        sol.step_norms.back());
  }

  sol.trajectory = propagate(sys, embed_tail(a_I, x, split));
  sol.head = a_I;
  sol.tail = x;
  sol.residual = periodicity_residual(sol.trajectory, split);
  return sol;
}

TailSystem build_tail_system(const GalerkinSystem& sys,
                             const Eigen::VectorXd& a_I,
                             const SplitIndex& split) {
  split.validate(sys);
  require(a_I.size() == split.k, "head vector must have one entry per head mode");
  require(a_I.allFinite(), "head vector must be finite");

  TailSystem ts;
  ts.jmat = detail::tail_monodromy_matrix(sys, split);
  const int m = split.tail_size();
  ts.offset = tail_at_period(
      sys, embed_tail(a_I, Eigen::VectorXd::Zero(m), split), split, true);

  const Eigen::MatrixXd eye_minus_j =
      Eigen::MatrixXd::Identity(m, m) - ts.jmat;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd_system(eye_minus_j);
  const double smax = svd_system.singularValues()(0);
  const double smin = svd_system.singularValues()(m - 1);
  ts.condition = smin > 0.0 ? smax / smin
                            : std::numeric_limits<double>::infinity();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd_map(ts.jmat);
  ts.tail_map_norm = svd_map.singularValues()(0);
  return ts;
}

PeriodicSolution solve_direct(const GalerkinSystem& sys,
                              const Eigen::VectorXd& a_I,
                              const SplitIndex& split) {
  const TailSystem ts = build_tail_system(sys, a_I, split);
  if (!(ts.condition <= 1e8)) {
    throw NearSingularError(
        "periodicity system is numerically singular (condition " +
            std::to_string(ts.condition) + "); a neutral or growing tail mode "
            "blocks the solve at this split",
        ts.condition);
  }
  const int m = split.tail_size();
  const Eigen::MatrixXd eye_minus_j =
      Eigen::MatrixXd::Identity(m, m) - ts.jmat;
  const Eigen::VectorXd tail = eye_minus_j.partialPivLu().solve(ts.offset);

  PeriodicSolution sol;
  sol.method = PeriodicMethod::direct;
  sol.trajectory = propagate(sys, embed_tail(a_I, tail, split));
  sol.head = a_I;
  sol.tail = tail;
  sol.residual = periodicity_residual(sol.trajectory, split);
  sol.iterations = 0;
  sol.mu_used = kNaN;
  sol.condition = ts.condition;
  sol.tail_map_norm = ts.tail_map_norm;
  return sol;
}

double periodicity_residual(const SpectralTrajectory& traj,
                            const SplitIndex& split) {
  require(traj.coeffs.rows() == split.n,
          "split truncation must match the trajectory's mode count");
  require(split.k >= 0 && split.k < split.n,
          "split head size must satisfy 0 <= k < n");
  if (traj.n_columns() < 2) return 0.0;
  const int m = split.tail_size();
  const Eigen::VectorXd diff =
      traj.coeffs.col(traj.n_columns() - 1).tail(m) -
      traj.coeffs.col(0).tail(m);
  return diff.cwiseAbs().maxCoeff();
}

}  // namespace periparab
