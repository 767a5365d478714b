#pragma once

#include <functional>

namespace zenomatch::quadrature {

struct Result {
  double value = 0.0;       // integral estimate
  double error = 0.0;       // accumulated error estimate (absolute)
  long evaluations = 0;     // integrand evaluations spent
  bool converged = false;   // error target met before the panel budget ran out
};

struct Options {
  double abs_tol = 0.0;        // absolute error target (0 = relative only)
  double rel_tol = 1e-11;      // relative error target
  int max_panels = 200000;     // subdivision budget
  double min_width = 0.0;      // panels narrower than this are accepted as-is
};

// Globally adaptive panel integration of f over [a, b]: a 10/21-point
// Gauss pair per panel, always splitting the panel with the largest error
// estimate. Not suitable for integrable endpoint singularities.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

}  // namespace zenomatch::quadrature
