#include "brvlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include <fmt/format.h>

#include "brvlab/error.hpp"

namespace brvlab {

double integrate(const std::function<double(double)>& f, double a, double b,
                 QuadratureTolerance tol) {
  if (!(a <= b)) {
    throw DomainError("integrate: empty or reversed interval");
  }
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, tol.max_depth, tol.relative, &error, &l1);
  if (!std::isfinite(value)) {
    throw NumericFailure("integrate: non-finite integral");
  }
  if (error > tol.absolute && error > tol.relative * l1) {
    throw NumericFailure(
        fmt::format("integrate: no convergence on [{:g}, {:g}], error estimate {:g}", a, b, error));
  }
  return value;
}

}  // namespace brvlab
