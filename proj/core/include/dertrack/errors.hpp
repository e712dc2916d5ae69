#pragma once

#include <stdexcept>
#include <string>

namespace dertrack {

// Base for everything thrown on purpose by this library. CLI maps scenario
// and input problems to exit code 2, numerical failures to exit code 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};

// ---- input / configuration problems -------------------------------------
struct NonRadialTopology : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct DimensionMismatch : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct NegativeAvailablePower : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct SocOutOfRange : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct DuplicateDeviceNode : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct UnknownNode : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct TooFewSamples : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct ScenarioLoadError : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct WindowNotFull : ScenarioError {
  using ScenarioError::ScenarioError;
};
struct MisalignedTrajectories : ScenarioError {
  using ScenarioError::ScenarioError;
};

// ---- numerical failures ---------------------------------------------------
struct SingularIncidence : NumericalError {
  using NumericalError::NumericalError;
};
// Thrown when a state leaves the barrier domain: s - f_i(u,t) <= 0.
// `index` is the offending row in the stacked constraint ordering
// [box lower (2n); box upper (2n); voltage lower (n); voltage upper (n)].
struct BarrierDomainViolation : NumericalError {
  BarrierDomainViolation(const std::string& what, int index_)
      : NumericalError(what), index(index_) {}
  int index;
};
struct IllConditionedHessian : NumericalError {
  using NumericalError::NumericalError;
};
struct StepRejected : NumericalError {
  using NumericalError::NumericalError;
};
struct RankDeficientExcitation : NumericalError {
  using NumericalError::NumericalError;
};
struct Infeasible : NumericalError {
  using NumericalError::NumericalError;
};
struct MaxIterations : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace dertrack
