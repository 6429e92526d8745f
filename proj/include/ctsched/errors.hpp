#pragma once

#include <stdexcept>
#include <string>

namespace ctsched {

// The step bounds and ramp limits admit no demand trajectory, or the
// envelope construction cannot connect two step levels within the limits.
class InfeasibleUncertaintyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The scheduling model has no feasible decision rule.
class ModelInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown inside the LP solver. Never reported as "optimal".
class SolverFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A case file failed to parse or validate.
class CaseFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rule record does not match the case it is applied to.
class ArtifactMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctsched
