#pragma once

#include <functional>

namespace brvlab {

struct QuadratureTolerance {
  double absolute = 1e-10;
  double relative = 1e-9;
  unsigned max_depth = 20;  // bisection levels
};

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b]; b may be +inf.
/// Throws NumericFailure when the error estimate exceeds both tolerances.
double integrate(const std::function<double(double)>& f, double a, double b,
                 QuadratureTolerance tol = {});

}  // namespace brvlab
