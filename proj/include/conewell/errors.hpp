#pragma once

#include <stdexcept>
#include <string>

namespace conewell {

/// Argument outside the mathematical domain of a function.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series, continued fraction, integrator or root search did not meet
/// its tolerance within the iteration budget.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation at (or numerically on top of) a pole of a log-derivative.
class pole_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The request is well formed but not supported for this geometry.
class unsupported_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Branch continuation lost track of its branch.
class branch_jump_error : public convergence_error {
 public:
  using convergence_error::convergence_error;
};

}  // namespace conewell
