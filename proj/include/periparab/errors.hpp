#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace periparab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input: bad dimensions, out-of-range parameters, malformed
/// configuration, constraint violations detectable before any solve.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Time stepping produced a non-finite state.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, int time_node)
      : Error(what), time_node(time_node) {}
  int time_node;
};

/// The tail map is not a contraction (estimated or observed norm >= 1).
class NonContractionError : public Error {
 public:
  using Error::Error;
};

/// The periodicity system I - J is numerically singular.
class NearSingularError : public Error {
 public:
  NearSingularError(const std::string& what, double condition)
      : Error(what), condition(condition) {}
  double condition;
};

/// Iteration budget exhausted before reaching the requested tolerance.
/// Carries the best tail iterate and its last step norm.
class ToleranceNotMetError : public Error {
 public:
  ToleranceNotMetError(const std::string& what, std::vector<double> best_tail,
                       double last_step)
      : Error(what), best_tail(std::move(best_tail)), last_step(last_step) {}
  std::vector<double> best_tail;
  double last_step;
};

/// No admissible split index within the allowed range reaches the target
/// contraction norm; a larger truncation is required.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The observation window cannot distinguish the head coefficients
/// (Gram matrix numerically rank-deficient).
class IllPosedObservationError : public Error {
 public:
  IllPosedObservationError(const std::string& what, double gram_min_eig)
      : Error(what), gram_min_eig(gram_min_eig) {}
  double gram_min_eig;
};

/// Descent could not find any admissible step that keeps the tail map
/// contractive; a larger split index is required.
class ContractionBudgetError : public Error {
 public:
  using Error::Error;
};

/// A built-in scenario did not behave as its construction guarantees.
class ScenarioContradictionError : public Error {
 public:
  using Error::Error;
};

}  // namespace periparab
