#include "tnbma/quadrature.hpp"

namespace tnbma {

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol) {
  return integrate_adaptive([&f](double x) { return f(x); }, a, b, abs_tol);
}

}  // namespace tnbma
