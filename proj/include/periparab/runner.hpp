#pragma once

#include <string>
#include <vector>

#include "periparab/analysis.hpp"
#include "periparab/config.hpp"
#include "periparab/identify.hpp"

namespace periparab {

/// Artifacts of the solve command: summary.json, trajectory.csv, field.csv.
struct SolveOutcome {
  int k = 0;
  double mu = 0.0;          ///< estimated tail map norm (NaN when unknown)
  std::string method;
  int iterations = 0;
  double residual = 0.0;    ///< recomputed from the written trajectory
  double condition = 0.0;   ///< cond(I - J) for the direct method, else NaN
  EnergyReport energy;      ///< recomputed from the written trajectory
  std::string summary_text;
  std::string summary_path;
  std::string trajectory_path;
  std::string field_path;
};

SolveOutcome run_solve(const RunConfig& config, const std::string& out_dir);

/// Artifacts of the choose-k command: summary.json.
struct ChooseKOutcome {
  int k = 0;
  double mu = 0.0;
  bool converged = false;
  std::string summary_text;
  std::string summary_path;
};

ChooseKOutcome run_choose_k(const RunConfig& config,
                            const std::string& out_dir);

/// Artifacts of the identify command: result.json, recovered_e.csv.
struct IdentifyOutcome {
  IdentificationResult result;
  std::string result_text;
  std::string result_path;
  std::string recovered_path;
};

IdentifyOutcome run_identify(const RunConfig& config,
                             const std::string& out_dir);

/// Artifacts and findings of the built-in resonance scenario: report.json.
struct Example34Outcome {
  double c = 0.0;           ///< the spectral offset (K pi)^2
  int n_modes = 0;
  double condition_defective = 0.0;  ///< cond(I - J) at split K-1 (inf here)
  bool defective_singular = false;
  double null_ratio = 0.0;  ///< |U_null^T offset| / |offset| at split K-1
  bool rhs_consistent = false;
  double condition_resolving = 0.0;  ///< cond(I - J) at split K
  double residual = 0.0;             ///< periodicity residual at split K
  double max_violation = 0.0;  ///< worst per-mode defect of the return relation
  std::vector<double> violations;    ///< one entry per mode
  std::string report_text;
  std::string report_path;
};

Example34Outcome run_example34(const RunConfig& config,
                               const std::string& out_dir);

namespace detail {
/// Integral over one period of g(t) e^{beta (t - t_ref)} with g = 1
/// (linear=false) or g = t (linear=true) and t_ref = 1 for beta >= 0, else 0;
/// the reference point keeps every exponential factor bounded by one.
[[nodiscard]] double profile_exponential_integral(double beta, bool linear);
}  // namespace detail

}  // namespace periparab
