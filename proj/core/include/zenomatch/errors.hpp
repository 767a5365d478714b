#pragma once

#include <stdexcept>
#include <string>

namespace zenomatch {

// Numerical failure: non-convergence, singular Newton step, no bracketable
// root, step-size underflow. The CLI maps this family to exit code 3.
class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by a non-converged root solve; carries the best iterate seen so the
// caller can inspect how close the solver got.
class non_convergence : public solver_error {
 public:
  non_convergence(const std::string& what, double best_value, double best_residual,
                  int iterations)
      : solver_error(what),
        best_value(best_value),
        best_residual(best_residual),
        iterations(iterations) {}

  double best_value = 0.0;     // best iterate (e.g. pulse interval, seconds)
  double best_residual = 0.0;  // residual of the defining identity at best_value
  int iterations = 0;          // iterations consumed
};

// The observable never fires: zero effective decay rate, an exact node of the
// excitation probability, or a decoupled measurement level. Mapped to exit
// code 4 so sweeps can mark the point instead of emitting non-finite numbers.
class never_detected : public std::runtime_error {
 public:
  explicit never_detected(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zenomatch
