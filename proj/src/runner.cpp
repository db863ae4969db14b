#include "periparab/runner.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>

#include "periparab/csvio.hpp"
#include "periparab/jsonout.hpp"
#include "periparab/periodic.hpp"

namespace periparab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

std::string join_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw ValidationError("cannot create output directory '" + out_dir +
                          "': " + ec.message());
  }
}

Eigen::VectorXd coefficient_samples(const CoefficientConfig& coeff,
                                    const SpatialGrid& grid) {
  if (coeff.constant) {
    return Eigen::VectorXd::Constant(grid.n_nodes, coeff.value);
  }
  return Eigen::Map<const Eigen::VectorXd>(
      coeff.samples.data(), static_cast<Eigen::Index>(coeff.samples.size()));
}

OperatorSpec make_operator(const OperatorConfig& op, const SpatialGrid& grid) {
  OperatorSpec spec;
  spec.a = coefficient_samples(op.a, grid);
  spec.b = coefficient_samples(op.b, grid);
  spec.c = coefficient_samples(op.c, grid);
  return spec;
}

/// Sampled space-time field for a zero / constant / file source.
Eigen::MatrixXd make_field_values(const FieldConfig& field,
                                  const SpatialGrid& grid, const TimeGrid& tg,
                                  const std::string& where) {
  const int n_times = tg.n_nodes();
  switch (field.source) {
    case FieldSource::zero:
      return Eigen::MatrixXd::Zero(grid.n_nodes, n_times);
    case FieldSource::constant:
      return Eigen::MatrixXd::Constant(grid.n_nodes, n_times, field.value);
    case FieldSource::file: {
      const Eigen::MatrixXd values = read_csv_matrix(field.path, false);
      require(values.rows() == grid.n_nodes && values.cols() == n_times,
              where + " file must hold " + std::to_string(grid.n_nodes) +
                  " rows x " + std::to_string(n_times) + " columns, found " +
                  std::to_string(values.rows()) + " x " +
                  std::to_string(values.cols()));
      return values;
    }
  }
  throw ValidationError(where + ": unreachable field source");
}

Perturbation make_perturbation(const PerturbationConfig& cfg,
                               const SpatialGrid& grid, const TimeGrid& tg,
                               const std::string& where) {
  Perturbation e = Perturbation::zero(grid, tg);
  e.values = make_field_values(cfg.field, grid, tg, where);
  e.q = cfg.q;
  e.bound_M = cfg.bound_M;
  return e;
}

Forcing make_forcing(const FieldConfig& cfg, const SpatialGrid& grid,
                     const TimeGrid& tg) {
  Forcing f = Forcing::zero(grid, tg);
  f.values = make_field_values(cfg, grid, tg, "forcing");
  return f;
}

/// Zero-pads user head values to the head size; more entries than head modes
/// is an error.
Eigen::VectorXd pad_head(const std::vector<double>& values, int k,
                         const std::string& where) {
  require(static_cast<int>(values.size()) <= k,
          where + " holds " + std::to_string(values.size()) +
              " entries but the head has only " + std::to_string(k) +
              " modes");
  Eigen::VectorXd head = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < values.size(); ++i) {
    head[static_cast<Eigen::Index>(i)] = values[i];
  }
  return head;
}

/// Trajectory CSV header "t,u_1,...,u_N".
std::string trajectory_header(int n_modes) {
  std::string header = "t";
  for (int j = 1; j <= n_modes; ++j) header += ",u_" + std::to_string(j);
  return header;
}

/// Trajectory matrix in file layout: one row per time node, first column t.
Eigen::MatrixXd trajectory_table(const SpectralTrajectory& traj) {
  const Eigen::Index n_times = traj.coeffs.cols();
  Eigen::MatrixXd table(n_times, traj.coeffs.rows() + 1);
  for (Eigen::Index i = 0; i < n_times; ++i) {
    table(i, 0) = traj.time_grid.times[static_cast<std::size_t>(i)];
  }
  table.rightCols(traj.coeffs.rows()) = traj.coeffs.transpose();
  return table;
}

std::vector<int> all_time_indices(const TimeGrid& tg) {
  std::vector<int> idx(static_cast<std::size_t>(tg.n_nodes()));
  for (int i = 0; i < tg.n_nodes(); ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

JsonValue energy_json(const EnergyReport& energy) {
  JsonValue j = JsonValue::object();
  j.set("sup_l2_sq", JsonValue::number(energy.sup_l2_sq));
  j.set("grad_integral", JsonValue::number(energy.grad_integral));
  j.set("data_norm_sq", JsonValue::number(energy.data_norm_sq));
  j.set("ratio", JsonValue::number(energy.ratio));
  return j;
}

JsonValue vector_json(const Eigen::VectorXd& v) {
  JsonValue j = JsonValue::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push(JsonValue::number(v[i]));
  return j;
}

}  // namespace

namespace detail {

double profile_exponential_integral(double beta, bool linear) {
  require(std::isfinite(beta), "profile integral needs a finite exponent");
  if (std::abs(beta) < 0.5) {
    // Power series about beta = 0 of the branch-matched integral; with
    // |beta| < 1/2 the 24-term tail is far below double precision.
    double sum = 0.0;
    double power = 1.0;
    double factorial = 1.0;
    for (int m = 0; m <= 24; ++m) {
      if (m > 0) {
        power *= (beta >= 0.0) ? -beta : beta;
        factorial *= m;
      }
      double cm;
      if (beta >= 0.0) {
        cm = linear ? (1.0 / (m + 1.0) - 1.0 / (m + 2.0)) / factorial
                    : 1.0 / (factorial * (m + 1.0));
      } else {
        cm = linear ? 1.0 / (factorial * (m + 2.0))
                    : 1.0 / (factorial * (m + 1.0));
      }
      sum += power * cm;
    }
    return sum;
  }
  if (beta >= 0.0) {
    const double one_minus_decay = -std::expm1(-beta);  // 1 - e^{-beta}
    return linear ? (beta - one_minus_decay) / (beta * beta)
                  : one_minus_decay / beta;
  }
  const double growth = std::exp(beta);
  return linear ? (growth * (beta - 1.0) + 1.0) / (beta * beta)
                : std::expm1(beta) / beta;
}

}  // namespace detail

SolveOutcome run_solve(const RunConfig& config, const std::string& out_dir) {
  require(config.command == "solve", "run_solve needs a solve configuration");
  const SpatialGrid grid =
      SpatialGrid::uniform(config.grid.length, config.grid.n_nodes);
  const TimeGrid tg =
      TimeGrid::uniform(config.time.horizon, config.time.n_steps);
  const EigenBasis basis = solve_operator_eigenproblem(
      make_operator(config.op, grid), grid, config.n_modes);
  const Perturbation e =
      make_perturbation(config.perturbation, grid, tg, "perturbation");
  const Forcing f = make_forcing(config.forcing, grid, tg);
  const GalerkinSystem sys = assemble(basis, e, f, tg);

  const SplitIndex split =
      config.split.automatic
          ? choose_k(sys, config.split.mu_target, config.split.k_max,
                     config.seed)
          : SplitIndex{config.split.k, config.n_modes};
  const ContractionEstimate estimate =
      tail_monodromy_norm(sys, split, config.seed);
  const Eigen::VectorXd a_I =
      pad_head(config.solve.a_head, split.k, "solve.a_head");

  PeriodicSolution sol =
      config.solve.method == "direct"
          ? solve_direct(sys, a_I, split)
          : solve_fixed_point(sys, a_I, split, config.solve.tol,
                              config.solve.max_iter, std::nullopt,
                              estimate.converged
                                  ? std::optional<double>(estimate.mu)
                                  : std::nullopt,
                              config.seed);

  // All artifacts are written only after the solve succeeded, and the summary
  // is recomputed from the written trajectory so the files round-trip.
  ensure_out_dir(out_dir);
  SolveOutcome outcome;
  outcome.trajectory_path = join_path(out_dir, "trajectory.csv");
  write_csv_matrix(outcome.trajectory_path, trajectory_table(sol.trajectory),
                   trajectory_header(config.n_modes));

  const Eigen::MatrixXd table = read_csv_matrix(outcome.trajectory_path, true);
  require(table.rows() == tg.n_nodes() && table.cols() == config.n_modes + 1,
          "written trajectory has unexpected shape");
  PeriodicSolution reread = sol;
  reread.trajectory.coeffs = table.rightCols(config.n_modes).transpose();
  outcome.residual = periodicity_residual(reread.trajectory, split);
  outcome.energy = energy_report(reread, sys, a_I, f);

  // Long-format field samples u(x_i, t_j) for plotting.
  const Eigen::MatrixXd field_values =
      basis.modes * reread.trajectory.coeffs;  // n_nodes x n_times
  Eigen::MatrixXd field_table(
      static_cast<Eigen::Index>(grid.n_nodes) * tg.n_nodes(), 3);
  Eigen::Index row = 0;
  for (int j = 0; j < tg.n_nodes(); ++j) {
    for (int i = 0; i < grid.n_nodes; ++i, ++row) {
      field_table(row, 0) = grid.nodes[i];
      field_table(row, 1) = tg.times[static_cast<std::size_t>(j)];
      field_table(row, 2) = field_values(i, j);
    }
  }
  outcome.field_path = join_path(out_dir, "field.csv");
  write_csv_matrix(outcome.field_path, field_table, "x,t,u");

  outcome.k = split.k;
  outcome.mu = estimate.converged ? estimate.mu : kNaN;
  outcome.method = config.solve.method;
  outcome.iterations = sol.iterations;
  outcome.condition = sol.condition;

  JsonValue summary = JsonValue::object();
  summary.set("schema", JsonValue::integer(1));
  summary.set("command", JsonValue::string("solve"));
  summary.set("n_modes", JsonValue::integer(config.n_modes));
  summary.set("k", JsonValue::integer(split.k));
  summary.set("method", JsonValue::string(config.solve.method));
  summary.set("mu", JsonValue::number(outcome.mu));
  summary.set("residual", JsonValue::number(outcome.residual));
  summary.set("iterations", JsonValue::integer(sol.iterations));
  summary.set("condition", JsonValue::number(sol.condition));
  summary.set("tail_map_norm", JsonValue::number(sol.tail_map_norm));
  summary.set("seed", JsonValue::integer(static_cast<long long>(config.seed)));
  summary.set("energy", energy_json(outcome.energy));
  outcome.summary_text = summary.dump();
  outcome.summary_path = join_path(out_dir, "summary.json");
  write_text_file(outcome.summary_path, outcome.summary_text);
  return outcome;
}

ChooseKOutcome run_choose_k(const RunConfig& config,
                            const std::string& out_dir) {
  require(config.command == "choose-k",
          "run_choose_k needs a choose-k configuration");
  const SpatialGrid grid =
      SpatialGrid::uniform(config.grid.length, config.grid.n_nodes);
  const TimeGrid tg =
      TimeGrid::uniform(config.time.horizon, config.time.n_steps);
  const EigenBasis basis = solve_operator_eigenproblem(
      make_operator(config.op, grid), grid, config.n_modes);
  const Perturbation e =
      make_perturbation(config.perturbation, grid, tg, "perturbation");
  const Forcing f = make_forcing(config.forcing, grid, tg);
  const GalerkinSystem sys = assemble(basis, e, f, tg);

  const SplitIndex split =
      choose_k(sys, config.split.mu_target, config.split.k_max, config.seed);
  const ContractionEstimate estimate =
      tail_monodromy_norm(sys, split, config.seed);

  ensure_out_dir(out_dir);
  ChooseKOutcome outcome;
  outcome.k = split.k;
  outcome.mu = estimate.mu;
  outcome.converged = estimate.converged;

  JsonValue summary = JsonValue::object();
  summary.set("schema", JsonValue::integer(1));
  summary.set("command", JsonValue::string("choose-k"));
  summary.set("n_modes", JsonValue::integer(config.n_modes));
  summary.set("k", JsonValue::integer(split.k));
  summary.set("mu", JsonValue::number(estimate.mu));
  summary.set("converged", JsonValue::boolean(estimate.converged));
  summary.set("mu_target", JsonValue::number(config.split.mu_target));
  summary.set("k_max", JsonValue::integer(config.split.k_max));
  summary.set("seed", JsonValue::integer(static_cast<long long>(config.seed)));
  outcome.summary_text = summary.dump();
  outcome.summary_path = join_path(out_dir, "summary.json");
  write_text_file(outcome.summary_path, outcome.summary_text);
  return outcome;
}

IdentifyOutcome run_identify(const RunConfig& config,
                             const std::string& out_dir) {
  require(config.command == "identify",
          "run_identify needs an identify configuration");
  const SpatialGrid grid =
      SpatialGrid::uniform(config.grid.length, config.grid.n_nodes);
  const TimeGrid tg =
      TimeGrid::uniform(config.time.horizon, config.time.n_steps);
  const IdentifyOptions& opts = config.identify;

  IdentificationProblem prob;
  prob.basis = solve_operator_eigenproblem(make_operator(config.op, grid),
                                           grid, config.n_modes);
  prob.time_grid = tg;
  prob.f = make_forcing(config.forcing, grid, tg);
  prob.split = SplitIndex{config.split.k, config.n_modes};
  prob.window = opts.window.full
                    ? ObservationWindow::full(grid)
                    : ObservationWindow::interval(grid, opts.window.lo,
                                                  opts.window.hi);
  prob.q = opts.q;
  prob.bound_M = opts.bound_M;
  prob.n_ex = opts.n_ex;
  prob.n_et = opts.n_et;

  const std::vector<int> selected = prob.window.selected();
  if (opts.target.from_file) {
    prob.target = read_csv_matrix(opts.target.path, false);
    require(prob.target.rows() == static_cast<Eigen::Index>(selected.size()) &&
                prob.target.cols() == tg.n_nodes(),
            "identify.target file must hold " +
                std::to_string(selected.size()) + " rows x " +
                std::to_string(tg.n_nodes()) + " columns, found " +
                std::to_string(prob.target.rows()) + " x " +
                std::to_string(prob.target.cols()));
  } else {
    const TwinConfig& twin = opts.target.twin;
    const Perturbation e_truth =
        make_perturbation(twin.e, grid, tg, "identify.target.e");
    const Eigen::VectorXd a_truth =
        pad_head(twin.a_head, prob.split.k, "identify.target.a_head");
    const GalerkinSystem sys_truth = assemble(prob.basis, e_truth, prob.f, tg);
    const PeriodicSolution truth = solve_direct(sys_truth, a_truth, prob.split);
    prob.target =
        evaluate_field(truth.trajectory, selected, all_time_indices(tg));
    if (twin.noise_sigma > 0.0) {
      const Eigen::VectorXd draws = periparab::detail::symmetric_uniform(
          twin.noise_seed,
          static_cast<int>(prob.target.rows() * prob.target.cols()));
      prob.target += twin.noise_sigma *
                     Eigen::Map<const Eigen::MatrixXd>(
                         draws.data(), prob.target.rows(), prob.target.cols());
    }
  }

  IdentifyConfig icfg;
  icfg.step_size = opts.step_size;
  icfg.max_outer = opts.max_outer;
  icfg.fd_step = opts.fd_step;
  icfg.tol = opts.tol;
  icfg.step_floor = opts.step_floor;
  icfg.tikhonov = opts.tikhonov;
  if (opts.fixed_a.has_value()) {
    icfg.fixed_a = pad_head(*opts.fixed_a, prob.split.k, "identify.fixed_a");
  }
  if (!opts.initial_params.empty()) {
    icfg.initial_params = Eigen::Map<const Eigen::VectorXd>(
        opts.initial_params.data(),
        static_cast<Eigen::Index>(opts.initial_params.size()));
  }

  IdentifyOutcome outcome;
  outcome.result = identify(prob, icfg);

  ensure_out_dir(out_dir);
  // Recovered coefficient parameters on the knot grid, long format.
  const auto knot = [](int index, int count, double extent) {
    return count == 1 ? 0.0 : extent * index / (count - 1);
  };
  Eigen::MatrixXd recovered(opts.n_ex * opts.n_et, 3);
  for (int ix = 0; ix < opts.n_ex; ++ix) {
    for (int it = 0; it < opts.n_et; ++it) {
      const int r = ix * opts.n_et + it;
      recovered(r, 0) = knot(ix, opts.n_ex, grid.length);
      recovered(r, 1) = knot(it, opts.n_et, tg.horizon);
      recovered(r, 2) = outcome.result.params[r];
    }
  }
  outcome.recovered_path = join_path(out_dir, "recovered_e.csv");
  write_csv_matrix(outcome.recovered_path, recovered, "x,t,e");

  JsonValue result = JsonValue::object();
  result.set("schema", JsonValue::integer(1));
  result.set("command", JsonValue::string("identify"));
  result.set("objective", JsonValue::number(outcome.result.objective));
  result.set("a_star", vector_json(outcome.result.a_star));
  result.set("gram_min_eig", JsonValue::number(outcome.result.gram_min_eig));
  result.set("iterations", JsonValue::integer(outcome.result.iterations));
  result.set("objective_history",
             JsonValue::number_array(outcome.result.objective_history));
  result.set("n_ex", JsonValue::integer(opts.n_ex));
  result.set("n_et", JsonValue::integer(opts.n_et));
  result.set("params", vector_json(outcome.result.params));
  outcome.result_text = result.dump();
  outcome.result_path = join_path(out_dir, "result.json");
  write_text_file(outcome.result_path, outcome.result_text);
  return outcome;
}

Example34Outcome run_example34(const RunConfig& config,
                               const std::string& out_dir) {
  require(config.command == "example34",
          "run_example34 needs an example34 configuration");
  const Example34Options& opts = config.example34;
  const int n_modes = opts.n_modes == 0 ? opts.K + 2 : opts.n_modes;
  require(opts.x_mode <= n_modes,
          "example34.x_mode must not exceed the truncation " +
              std::to_string(n_modes));
  const SpatialGrid grid = SpatialGrid::uniform(1.0, opts.n_nodes);
  const TimeGrid tg = TimeGrid::uniform(1.0, opts.n_steps);

  EigenBasis basis = dirichlet_laplacian_basis(n_modes, grid);
  // Spectral offset c = (K pi)^2 taken from the basis itself, so the K-th
  // shifted eigenvalue is exactly zero (the neutral mode).
  const double c = basis.lambdas[opts.K - 1];
  basis.lambdas.array() -= c;

  const bool linear = opts.profile == "linear";
  Forcing f = Forcing::zero(grid, tg);
  for (int i = 0; i < tg.n_nodes(); ++i) {
    const double g = linear ? tg.times[static_cast<std::size_t>(i)] : 1.0;
    for (int r = 0; r < grid.n_nodes; ++r) {
      f.values(r, i) =
          opts.amplitude * std::sin(opts.x_mode * M_PI * grid.nodes[r]) * g;
    }
  }
  const Perturbation e = Perturbation::zero(grid, tg);
  const GalerkinSystem sys = assemble(basis, e, f, tg);

  const Eigen::VectorXd a_at = pad_head(opts.a_head, opts.K, "example34.a_head");
  const Eigen::VectorXd a_below = a_at.head(opts.K - 1);

  // Defective split: the neutral mode sits in the tail, so I - J is
  // numerically singular and the periodic problem is obstructed.
  const SplitIndex split_below{opts.K - 1, n_modes};
  const TailSystem below = build_tail_system(sys, a_below, split_below);

  Example34Outcome outcome;
  outcome.c = c;
  outcome.n_modes = n_modes;
  outcome.condition_defective = below.condition;
  outcome.defective_singular = !(below.condition <= 1e8);
  if (!outcome.defective_singular) {
    throw ScenarioContradictionError(
        "the defective split produced a well-conditioned periodicity system "
        "(condition " +
        std::to_string(below.condition) + ")");
  }

  // Solvability of the singular system: the right-hand side must be
  // orthogonal to the left null space of I - J.
  const Eigen::MatrixXd eye_minus_j =
      Eigen::MatrixXd::Identity(below.jmat.rows(), below.jmat.cols()) -
      below.jmat;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(eye_minus_j,
                                              Eigen::ComputeFullU);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  double null_projection_sq = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] <= 1e-8 * sigma_max) {
      const double component = svd.matrixU().col(i).dot(below.offset);
      null_projection_sq += component * component;
    }
  }
  const double offset_norm = below.offset.norm();
  outcome.null_ratio =
      offset_norm == 0.0 ? 0.0 : std::sqrt(null_projection_sq) / offset_norm;
  outcome.rhs_consistent = outcome.null_ratio < 1e-6;

  // Resolving split: the neutral mode joins the head and the tail problem is
  // well posed.
  const SplitIndex split_at{opts.K, n_modes};
  const PeriodicSolution sol = solve_direct(sys, a_at, split_at);
  outcome.condition_resolving = sol.condition;
  outcome.residual = sol.residual;

  // Per-mode defect of the one-period return relation, checked in the
  // decaying direction so every exponential factor stays bounded.
  outcome.violations.resize(static_cast<std::size_t>(n_modes));
  const double projection = opts.amplitude / std::sqrt(2.0);
  for (int mode = 1; mode <= n_modes; ++mode) {
    const double beta = basis.lambdas[mode - 1];
    const double a0 = sol.trajectory.coeffs(mode - 1, 0);
    const double aT = sol.trajectory.coeffs(mode - 1, tg.n_steps);
    const double forcing_term =
        mode == opts.x_mode
            ? projection * detail::profile_exponential_integral(beta, linear)
            : 0.0;
    const double defect =
        beta >= 0.0 ? aT - a0 * std::exp(-beta) - forcing_term
                    : aT * std::exp(beta) - a0 - forcing_term;
    outcome.violations[static_cast<std::size_t>(mode - 1)] = std::abs(defect);
  }
  outcome.max_violation = 0.0;
  for (const double v : outcome.violations) {
    outcome.max_violation = std::max(outcome.max_violation, v);
  }

  ensure_out_dir(out_dir);
  JsonValue report = JsonValue::object();
  report.set("schema", JsonValue::integer(1));
  report.set("command", JsonValue::string("example34"));
  report.set("K", JsonValue::integer(opts.K));
  report.set("c", JsonValue::number(c));
  report.set("n_modes", JsonValue::integer(n_modes));
  report.set("x_mode", JsonValue::integer(opts.x_mode));
  report.set("profile", JsonValue::string(opts.profile));
  report.set("amplitude", JsonValue::number(opts.amplitude));
  report.set("n_nodes", JsonValue::integer(opts.n_nodes));
  report.set("n_steps", JsonValue::integer(opts.n_steps));
  JsonValue defective = JsonValue::object();
  defective.set("k", JsonValue::integer(split_below.k));
  defective.set("condition", JsonValue::number(below.condition));
  defective.set("singular", JsonValue::boolean(outcome.defective_singular));
  defective.set("null_ratio", JsonValue::number(outcome.null_ratio));
  defective.set("rhs_consistent",
                JsonValue::boolean(outcome.rhs_consistent));
  report.set("split_defective", defective);
  JsonValue resolving = JsonValue::object();
  resolving.set("k", JsonValue::integer(split_at.k));
  resolving.set("condition", JsonValue::number(sol.condition));
  resolving.set("residual", JsonValue::number(sol.residual));
  resolving.set("max_violation", JsonValue::number(outcome.max_violation));
  report.set("split_resolving", resolving);
  JsonValue violations = JsonValue::array();
  for (const double v : outcome.violations) violations.push(JsonValue::number(v));
  report.set("violations", violations);
  outcome.report_text = report.dump();
  outcome.report_path = join_path(out_dir, "report.json");
  write_text_file(outcome.report_path, outcome.report_text);
  return outcome;
}

}  // namespace periparab
