#include "periparab/identify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "periparab/parallel.hpp"

namespace periparab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> all_time_indices(const TimeGrid& tg) {
  std::vector<int> idx(tg.n_nodes());
  for (int i = 0; i < tg.n_nodes(); ++i) idx[i] = i;
  return idx;
}

/// Weighted space-time inner product over the window samples.
double window_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    const Eigen::VectorXd& wx, const Eigen::VectorXd& wt) {
  return wx.dot(a.cwiseProduct(b) * wt);
}

Eigen::VectorXd embed(const Eigen::VectorXd& head, const Eigen::VectorXd& tail,
                      const SplitIndex& split) {
  Eigen::VectorXd full(split.n);
  full.head(split.k) = head;
  full.tail(split.tail_size()) = tail;
  return full;
}

/// Contraction and conditioning guards shared by the identification paths.
void check_tail_system(const TailSystem& ts) {
  if (ts.tail_map_norm >= 1.0) {
    throw NonContractionError(
        "tail map norm " + std::to_string(ts.tail_map_norm) +
        " is not below 1 for this coefficient; a larger head is required");
  }
  if (!(ts.condition <= 1e8)) {
    throw NearSingularError(
        "periodicity system is numerically singular (condition " +
            std::to_string(ts.condition) + ")",
        ts.condition);
  }
}

}  // namespace

ObservationWindow ObservationWindow::full(const SpatialGrid& grid) {
  ObservationWindow w;
  w.x_mask.assign(grid.n_nodes, true);
  return w;
}

ObservationWindow ObservationWindow::interval(const SpatialGrid& grid, int lo,
                                              int hi) {
  require(lo >= 0 && lo <= hi && hi < grid.n_nodes,
          "window interval must satisfy 0 <= lo <= hi < n_nodes");
  ObservationWindow w;
  w.x_mask.assign(grid.n_nodes, false);
  for (int i = lo; i <= hi; ++i) w.x_mask[i] = true;
  return w;
}

void ObservationWindow::validate(const SpatialGrid& grid) const {
  require(static_cast<int>(x_mask.size()) == grid.n_nodes,
          "window mask must have one flag per grid node");
  int first = -1;
  int last = -1;
  int interior = 0;
  for (int i = 0; i < grid.n_nodes; ++i) {
    if (!x_mask[i]) continue;
    if (first < 0) first = i;
    last = i;
    if (i > 0 && i < grid.n_nodes - 1) ++interior;
  }
  require(first >= 0, "window must select at least one node");
  for (int i = first; i <= last; ++i) {
    require(x_mask[i], "window selection must be contiguous");
  }
  require(interior >= 3, "window must contain at least 3 interior nodes");
}

std::vector<int> ObservationWindow::selected() const {
  std::vector<int> idx;
  for (std::size_t i = 0; i < x_mask.size(); ++i) {
    if (x_mask[i]) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

void IdentificationProblem::validate() const {
  require(basis.n_modes >= 1, "identification needs a nonempty basis");
  require(split.n == basis.n_modes,
          "split truncation must match the basis mode count");
  require(split.k >= 0 && split.k < split.n,
          "split head size must satisfy 0 <= k < n");
  require(time_grid.n_steps >= 1, "identification needs a time grid");
  f.validate(basis.grid, time_grid);
  window.validate(basis.grid);
  const auto sel = window.selected();
  require(target.rows() == static_cast<Eigen::Index>(sel.size()) &&
              target.cols() == time_grid.n_nodes(),
          "observation target must be sampled on window nodes x time nodes");
  require(target.allFinite(), "observation target must be finite");
  require(std::isfinite(q) && q >= 1.5, "coefficient exponent q must be >= 3/2");
  require(std::isfinite(bound_M) && bound_M > 0.0,
          "coefficient bound M must be positive");
  require(n_ex >= 1 && n_ex <= basis.grid.n_nodes,
          "x parameterization must be coarser than the grid");
  require(n_et >= 1 && n_et <= time_grid.n_nodes(),
          "t parameterization must be coarser than the time grid");
}

Eigen::VectorXd window_quad_weights(const ObservationWindow& window,
                                    const SpatialGrid& grid) {
  window.validate(grid);
  const auto sel = window.selected();
  const double h = grid.spacing();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(sel.size(), h);
  w[0] *= 0.5;
  w[w.size() - 1] *= 0.5;
  return w;
}

namespace detail {

Eigen::MatrixXd bilinear_interpolate(const Eigen::VectorXd& params, int n_ex,
                                     int n_et, const SpatialGrid& grid,
                                     const TimeGrid& tg) {
  require(n_ex >= 1 && n_et >= 1, "parameter table must be nonempty");
  require(params.size() == static_cast<Eigen::Index>(n_ex) * n_et,
          "parameter vector must hold n_ex * n_et entries");

  auto axis_weights = [](const Eigen::VectorXd& coords, double length,
                         int n_knots) {
    Eigen::MatrixXd w =
        Eigen::MatrixXd::Zero(coords.size(), n_knots);
    if (n_knots == 1) {
      w.setOnes();
      return w;
    }
    const double spacing = length / (n_knots - 1);
    for (int r = 0; r < coords.size(); ++r) {
      double s = coords[r] / spacing;
      int cell = static_cast<int>(std::floor(s));
      cell = std::clamp(cell, 0, n_knots - 2);
      const double theta = std::clamp(s - cell, 0.0, 1.0);
      w(r, cell) = 1.0 - theta;
      w(r, cell + 1) = theta;
    }
    return w;
  };

  const Eigen::MatrixXd wx = axis_weights(grid.nodes, grid.length, n_ex);
  const Eigen::MatrixXd wt = axis_weights(tg.times, tg.horizon, n_et);
  Eigen::MatrixXd table(n_ex, n_et);
  for (int ix = 0; ix < n_ex; ++ix) {
    for (int it = 0; it < n_et; ++it) {
      table(ix, it) = params[ix * n_et + it];
    }
  }
  return wx * table * wt.transpose();
}

}  // namespace detail

Perturbation project_onto_mq(const Eigen::MatrixXd& values, double q,
                             double bound_M, const SpatialGrid& grid) {
  require(values.rows() == grid.n_nodes,
          "coefficient samples must live on the grid nodes");
  require(values.allFinite(), "coefficient samples must be finite");
  require(std::isfinite(bound_M) && bound_M > 0.0,
          "coefficient bound M must be positive");
  Perturbation out;
  out.q = q;
  out.bound_M = bound_M;
  out.values = values;
  for (int i = 0; i < values.cols(); ++i) {
    const double norm = lq_norm(out.values.col(i), q, grid);
    if (norm > bound_M * (1.0 + 1e-12)) {
      out.values.col(i) *= bound_M / norm;
    }
  }
  return out;
}

double objective(const Perturbation& e, const Eigen::VectorXd& a_I,
                 const IdentificationProblem& prob) {
  prob.validate();
  require(a_I.size() == prob.split.k,
          "head vector must have one entry per head mode");
  require(a_I.allFinite(), "head vector must be finite");

  const GalerkinSystem sys = assemble(prob.basis, e, prob.f, prob.time_grid);
  const TailSystem ts = build_tail_system(sys, a_I, prob.split);
  check_tail_system(ts);
  const int m = prob.split.tail_size();
  const Eigen::VectorXd tail =
      (Eigen::MatrixXd::Identity(m, m) - ts.jmat)
          .partialPivLu()
          .solve(ts.offset);
  const SpectralTrajectory traj = propagate(sys, embed(a_I, tail, prob.split));

  const Eigen::MatrixXd sampled =
      evaluate_field(traj, prob.window.selected(), all_time_indices(prob.time_grid));
  const Eigen::MatrixXd diff = sampled - prob.target;
  const Eigen::VectorXd wx = window_quad_weights(prob.window, prob.basis.grid);
  const Eigen::VectorXd wt = detail::time_trapezoid_weights(prob.time_grid);
  return window_inner(diff, diff, wx, wt);
}

HeadSolve solve_head_given_e(const Perturbation& e,
                             const IdentificationProblem& prob) {
  prob.validate();
  const int k = prob.split.k;
  const int m = prob.split.tail_size();
  const GalerkinSystem sys = assemble(prob.basis, e, prob.f, prob.time_grid);
  const TailSystem ts =
      build_tail_system(sys, Eigen::VectorXd::Zero(k), prob.split);
  check_tail_system(ts);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(
      Eigen::MatrixXd::Identity(m, m) - ts.jmat);

  const auto sel = prob.window.selected();
  const auto t_idx = all_time_indices(prob.time_grid);

  // Base solution with zero head.
  const Eigen::VectorXd base_tail = lu.solve(ts.offset);
  const SpectralTrajectory base_traj =
      propagate(sys, embed(Eigen::VectorXd::Zero(k), base_tail, prob.split));
  const Eigen::MatrixXd base = evaluate_field(base_traj, sel, t_idx);

  // One homogeneous sensitivity solve per head mode.
  std::vector<Eigen::MatrixXd> sensitivities(k);
  parallel_for(0, k, [&](std::ptrdiff_t j) {
    Eigen::VectorXd unit_head = Eigen::VectorXd::Zero(k);
    unit_head[static_cast<int>(j)] = 1.0;
    const Eigen::VectorXd start =
        embed(unit_head, Eigen::VectorXd::Zero(m), prob.split);
    const SpectralTrajectory reach =
        detail::propagate_span(sys, start, 0, -1, false);
    const Eigen::VectorXd tail =
        lu.solve(reach.coeffs.col(reach.n_columns() - 1).tail(m).eval());
    const SpectralTrajectory w_traj = detail::propagate_span(
        sys, embed(unit_head, tail, prob.split), 0, -1, false);
    sensitivities[j] = evaluate_field(w_traj, sel, t_idx);
  });

  const Eigen::VectorXd wx = window_quad_weights(prob.window, prob.basis.grid);
  const Eigen::VectorXd wt = detail::time_trapezoid_weights(prob.time_grid);
  const Eigen::MatrixXd misfit = prob.target - base;

  HeadSolve out;
  out.gram = Eigen::MatrixXd(k, k);
  out.rhs = Eigen::VectorXd(k);
  for (int i = 0; i < k; ++i) {
    for (int l = i; l < k; ++l) {
      const double v = window_inner(sensitivities[i], sensitivities[l], wx, wt);
      out.gram(i, l) = v;
      out.gram(l, i) = v;
    }
    out.rhs[i] = window_inner(sensitivities[i], misfit, wx, wt);
  }

  if (k == 0) {
    out.a_star = Eigen::VectorXd(0);
    out.gram_min_eig = 0.0;
    return out;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.gram);
  out.gram_min_eig = eig.eigenvalues()(0);
  if (out.gram_min_eig <= 1e-12 * out.gram.trace() / k) {
    throw IllPosedObservationError(
        "observation window cannot distinguish the head coefficients "
        "(Gram minimum eigenvalue " +
            std::to_string(out.gram_min_eig) + ")",
        out.gram_min_eig);
  }
  out.a_star = out.gram.ldlt().solve(out.rhs);
  return out;
}

IdentificationResult identify(const IdentificationProblem& prob,
                              const IdentifyConfig& config) {
  prob.validate();
  require(std::isfinite(config.step_size) && config.step_size > 0.0,
          "descent step size must be positive");
  require(config.max_outer >= 1, "outer iteration budget must be positive");
  require(std::isfinite(config.fd_step) && config.fd_step > 0.0,
          "finite-difference step must be positive");
  require(std::isfinite(config.tol) && config.tol >= 0.0,
          "termination tolerance must be nonnegative");
  require(config.step_floor > 0.0 && config.step_floor <= config.step_size,
          "step floor must lie in (0, step_size]");
  require(std::isfinite(config.tikhonov) && config.tikhonov >= 0.0,
          "penalty weight must be nonnegative");
  if (config.fixed_a.has_value()) {
    require(config.fixed_a->size() == prob.split.k,
            "fixed head vector must have one entry per head mode");
    require(config.fixed_a->allFinite(), "fixed head vector must be finite");
  }

  const int n_params = prob.n_ex * prob.n_et;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_params);
  if (config.initial_params.size() > 0) {
    require(config.initial_params.size() == n_params,
            "initial parameter vector must hold n_ex * n_et entries");
    require(config.initial_params.allFinite(),
            "initial parameters must be finite");
    p = config.initial_params;
  }

  auto make_e = [&](const Eigen::VectorXd& params) {
    return project_onto_mq(
        detail::bilinear_interpolate(params, prob.n_ex, prob.n_et,
                                     prob.basis.grid, prob.time_grid),
        prob.q, prob.bound_M, prob.basis.grid);
  };
  auto penalized = [&](const Eigen::VectorXd& params,
                       const Eigen::VectorXd& a) {
    return objective(make_e(params), a, prob) +
           config.tikhonov * params.squaredNorm();
  };
  // Trial evaluations that leave the certifiable regime count as rejections.
  auto try_penalized =
      [&](const Eigen::VectorXd& params,
          const Eigen::VectorXd& a) -> std::optional<double> {
    try {
      return penalized(params, a);
    } catch (const NonContractionError&) {
      return std::nullopt;
    } catch (const NearSingularError&) {
      return std::nullopt;
    } catch (const IntegrationFailure&) {
      return std::nullopt;
    }
  };

  IdentificationResult result;
  Eigen::VectorXd a(prob.split.k);
  double alpha = config.step_size;

  for (int it = 1; it <= config.max_outer; ++it) {
    result.iterations = it;

    // Exact head step.
    if (config.fixed_a.has_value()) {
      a = *config.fixed_a;
    } else {
      const HeadSolve hs = solve_head_given_e(make_e(p), prob);
      a = hs.a_star;
      result.gram_min_eig = hs.gram_min_eig;
    }
    double current = penalized(p, a);

    // Projected finite-difference descent step on the e parameters.
    Eigen::VectorXd grad(n_params);
    parallel_for(0, n_params, [&](std::ptrdiff_t j) {
      Eigen::VectorXd plus = p;
      Eigen::VectorXd minus = p;
      plus[j] += config.fd_step;
      minus[j] -= config.fd_step;
      const double fp = try_penalized(plus, a).value_or(current);
      const double fm = try_penalized(minus, a).value_or(current);
      grad[j] = (fp - fm) / (2.0 * config.fd_step);
    });

    if (grad.norm() > 0.0) {
      double step = alpha;
      int clean_trials = 0;
      int rejections = 0;
      while (step >= config.step_floor) {
        const Eigen::VectorXd trial = p - step * grad;
        if (!trial.allFinite()) {  // oversized step overflowed; just shrink
          step *= 0.5;
          continue;
        }
        const std::optional<double> value = try_penalized(trial, a);
        if (!value.has_value()) {
          ++rejections;
          step *= 0.5;
          continue;
        }
        ++clean_trials;
        if (*value < current) {
          p = trial;
          current = *value;
          // Let the step grow without a ceiling: the right scale depends on
          // the objective's curvature, and rejections shrink it again.
          alpha = 4.0 * step;
          break;
        }
        step *= 0.5;
      }
      if (clean_trials == 0 && rejections > 0) {
        throw ContractionBudgetError(
            "every trial coefficient update lost contraction down to the "
            "step floor; a larger head split is required");
      }
    }

    result.objective_history.push_back(current);
    const std::size_t n_hist = result.objective_history.size();
    if (n_hist >= 2 &&
        result.objective_history[n_hist - 2] -
                result.objective_history[n_hist - 1] <
            config.tol) {
      break;
    }
  }

  // Final consistency pass at the last accepted parameters.
  result.e_star = make_e(p);
  result.params = p;
  if (config.fixed_a.has_value()) {
    result.a_star = *config.fixed_a;
    result.gram_min_eig = kNaN;
  } else {
    const HeadSolve hs = solve_head_given_e(result.e_star, prob);
    result.a_star = hs.a_star;
    result.gram_min_eig = hs.gram_min_eig;
  }
  result.objective = objective(result.e_star, result.a_star, prob);
  return result;
}

}  // namespace periparab
