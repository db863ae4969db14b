#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "periparab/galerkin.hpp"

namespace periparab {

/// Partition of the N spectral coefficients into a head of the first k modes
/// (with prescribed initial values) and a tail of the remaining n - k modes
/// (subject to the time-periodicity constraint).
struct SplitIndex {
  int k = 0;  ///< number of head modes, 0 <= k < n
  int n = 0;  ///< truncation dimension

  /// Throws ValidationError unless 0 <= k < n and n matches the system.
  void validate(const GalerkinSystem& sys) const;

  [[nodiscard]] int tail_size() const { return n - k; }
};

/// Estimated operator norm of the homogeneous tail return map a_II ->
/// tail of u(T), obtained by power iteration on the normal equations.
struct ContractionEstimate {
  double mu = 0.0;
  SplitIndex split;
  int iterations = 0;
  bool converged = false;
};

enum class PeriodicMethod { fixed_point, direct };

/// A solution of the mixed head/tail problem: prescribed head initial values
/// and a tail that returns to itself after one period.
struct PeriodicSolution {
  SpectralTrajectory trajectory;
  Eigen::VectorXd head;  ///< prescribed a_I, length k
  Eigen::VectorXd tail;  ///< computed a_II = u_II(0), length n - k
  double residual = 0.0;  ///< max over tail modes of |u_j(T) - u_j(0)|
  PeriodicMethod method = PeriodicMethod::fixed_point;

  // Diagnostics. Fields that do not apply to the producing method are NaN
  // (for reals) or empty (for sequences).
  int iterations = 0;                   ///< fixed-point steps taken
  std::vector<double> step_norms;       ///< |x_{m+1} - x_m| per step
  double mu_used = 0.0;                 ///< contraction norm used for stopping
  double condition = 0.0;               ///< cond(I - J) (direct method)
  double tail_map_norm = 0.0;           ///< largest singular value of J
};

/// The dense affine tail map x -> J x + offset together with conditioning
/// diagnostics of the periodicity system I - J.
struct TailSystem {
  Eigen::MatrixXd jmat;     ///< (n-k) x (n-k) homogeneous return map
  Eigen::VectorXd offset;   ///< tail at T of the forced run from (a_I, 0)
  double condition = 0.0;      ///< sigma_max / sigma_min of I - J
  double tail_map_norm = 0.0;  ///< sigma_max of J
};

/// Estimates the spectral norm of the homogeneous tail return map by power
/// iteration on J^T J. Deterministic for a fixed seed. Returns
/// converged=false when successive Rayleigh quotients still differ by
/// >= 1e-8 relative after max_iter steps.
[[nodiscard]] ContractionEstimate tail_monodromy_norm(const GalerkinSystem& sys,
                                                      const SplitIndex& split,
                                                      std::uint64_t seed = 12345,
                                                      int max_iter = 200);

/// Smallest k <= k_max whose tail map norm is at or below mu_target.
/// Throws CapacityError when no scanned split reaches the target.
[[nodiscard]] SplitIndex choose_k(const GalerkinSystem& sys,
                                  double mu_target = 0.75, int k_max = 8,
                                  std::uint64_t seed = 12345);

/// Banach iteration x_{m+1} = J x_m + offset starting from tail_init (zero
/// by default), stopping when the step norm passes the a-posteriori bound
/// tol (1 - mu)/mu; the returned trajectory is one further forced
/// propagation from the accepted tail, so its periodicity residual is at
/// most tol (1 - mu). The contraction norm is taken from mu_hint when given
/// and estimated otherwise; mu >= 1 or a step norm exceeding twice the first
/// step raises NonContractionError, and an exhausted budget raises
/// ToleranceNotMetError carrying the best iterate.
[[nodiscard]] PeriodicSolution solve_fixed_point(
    const GalerkinSystem& sys, const Eigen::VectorXd& a_I,
    const SplitIndex& split, double tol = 1e-9, int max_iter = 200,
    const std::optional<Eigen::VectorXd>& tail_init = std::nullopt,
    std::optional<double> mu_hint = std::nullopt, std::uint64_t seed = 12345);

/// Builds the dense tail map (one homogeneous propagation per tail mode, one
/// forced propagation for the offset) and its conditioning diagnostics.
[[nodiscard]] TailSystem build_tail_system(const GalerkinSystem& sys,
                                           const Eigen::VectorXd& a_I,
                                           const SplitIndex& split);

/// Solves (I - J) a_II = offset by dense LU and propagates once from
/// (a_I, a_II). Throws NearSingularError when cond(I - J) exceeds 1e8.
[[nodiscard]] PeriodicSolution solve_direct(const GalerkinSystem& sys,
                                            const Eigen::VectorXd& a_I,
                                            const SplitIndex& split);

/// max over tail modes j >= k of |u_j(last) - u_j(first)| for the stored
/// trajectory columns.
[[nodiscard]] double periodicity_residual(const SpectralTrajectory& traj,
                                          const SplitIndex& split);

namespace detail {
/// Deterministic pseudo-random vector with entries in [-1, 1), derived from
/// the raw bit stream of a 64-bit Mersenne Twister (independent of any
/// library distribution implementation).
[[nodiscard]] Eigen::VectorXd symmetric_uniform(std::uint64_t seed, int count);

/// Dense homogeneous tail return map: column j is the tail at T of the
/// propagation started from the (k + j)-th unit vector.
[[nodiscard]] Eigen::MatrixXd tail_monodromy_matrix(const GalerkinSystem& sys,
                                                    const SplitIndex& split);
}  // namespace detail

}  // namespace periparab
