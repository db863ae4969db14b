#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace periparab {

/// Spatial domain block.
struct GridConfig {
  double length = 1.0;
  int n_nodes = 101;
};

/// One operator coefficient: a constant or a node-sampled table.
struct CoefficientConfig {
  bool constant = true;
  double value = 0.0;
  std::vector<double> samples;  ///< used when !constant; one entry per node
};

/// Elliptic operator block; defaults to the Dirichlet Laplacian.
struct OperatorConfig {
  CoefficientConfig a{true, 1.0, {}};
  CoefficientConfig b{true, 0.0, {}};
  CoefficientConfig c{true, 0.0, {}};
};

/// Time discretization block.
struct TimeConfig {
  double horizon = 1.0;
  int n_steps = 200;
};

/// Head/tail split: automatic scan or a fixed index.
struct SplitConfig {
  bool automatic = true;
  int k = 0;               ///< used when !automatic
  double mu_target = 0.75;  ///< used when automatic
  int k_max = 8;            ///< used when automatic
};

/// Where a sampled space-time field comes from.
enum class FieldSource { zero, constant, file };

struct FieldConfig {
  FieldSource source = FieldSource::zero;
  double value = 0.0;  ///< for source == constant
  std::string path;    ///< for source == file; resolved against the config dir
};

/// Perturbation field together with its admissible-ball parameters.
struct PerturbationConfig {
  FieldConfig field;
  double q = 2.0;
  double bound_M = 1.0;
};

/// Options for the solve command.
struct SolveOptions {
  std::vector<double> a_head;  ///< zero-padded to the head size
  double tol = 1e-9;
  int max_iter = 200;
  std::string method = "fixed_point";  ///< "fixed_point" | "direct"
};

/// Observation window: full domain or the node range [lo, hi].
struct WindowConfig {
  bool full = true;
  int lo = 0;
  int hi = 0;
};

/// Twin-experiment data generation for the identify command.
struct TwinConfig {
  PerturbationConfig e;
  std::vector<double> a_head;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

/// Identification target: an observation file or a generated twin.
struct TargetConfig {
  bool from_file = false;
  std::string path;
  TwinConfig twin;
};

/// Options for the identify command.
struct IdentifyOptions {
  WindowConfig window;
  TargetConfig target;
  int n_ex = 5;
  int n_et = 5;
  double q = 2.0;
  double bound_M = 1.0;
  std::optional<std::vector<double>> fixed_a;
  std::vector<double> initial_params;
  double step_size = 1.0;
  int max_outer = 60;
  double fd_step = 1e-4;
  double tol = 1e-12;
  double step_floor = 1e-8;
  double tikhonov = 0.0;
};

/// Options for the built-in resonance scenario.
struct Example34Options {
  int K = 1;
  int n_modes = 0;  ///< 0 means K + 2
  int n_nodes = 201;
  int n_steps = 2000;
  int x_mode = 1;          ///< spatial mode of the forcing sin(x_mode pi x)
  double amplitude = 1.0;
  std::string profile = "constant";  ///< time profile: "constant" | "linear"
  std::vector<double> a_head;        ///< head values for the resolving split
};

/// Fully parsed and range-checked run configuration for one command.
struct RunConfig {
  std::string command;  ///< "solve" | "choose-k" | "identify" | "example34"
  GridConfig grid;
  OperatorConfig op;
  TimeConfig time;
  int n_modes = 8;
  SplitConfig split;
  PerturbationConfig perturbation;
  FieldConfig forcing;
  std::uint64_t seed = 12345;
  SolveOptions solve;
  IdentifyOptions identify;
  Example34Options example34;
};

/// Parses and validates configuration text for the given command. Unknown
/// keys, type mismatches, out-of-range values, a missing or wrong "schema",
/// and missing referenced files all raise ValidationError. Relative file
/// paths are resolved against base_dir.
[[nodiscard]] RunConfig parse_config_text(const std::string& text,
                                          const std::string& command,
                                          const std::string& base_dir = ".");

/// parse_config_text applied to a file, resolving relative paths against the
/// file's own directory.
[[nodiscard]] RunConfig parse_config_file(const std::string& path,
                                          const std::string& command);

}  // namespace periparab
