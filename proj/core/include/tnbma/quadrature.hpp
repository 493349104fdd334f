#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace tnbma {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7-15 pair (QUADPACK dqk15 abscissae/weights).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGk15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGauss7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gk15(F& f, double a, double b, double& kronrod, double& err) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double fc = f(c);
  double resk = kGk15Weights[7] * fc;
  double resg = kGauss7Weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kGk15Nodes[i];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kGk15Weights[i] * fsum;
    if (i % 2 == 1) resg += kGauss7Weights[i / 2] * fsum;
  }
  kronrod = resk * h;
  err = std::fabs((resk - resg) * h);
}

template <class F>
void integrate_segment(F& f, double a, double b, double tol, int depth,
                       QuadratureResult& out) {
  double value, err;
  gk15(f, a, b, value, err);
  out.evaluations += 15;
  if (err <= tol || depth >= 48) {
    out.value += value;
    out.error_estimate += err;
    if (err > tol) out.converged = false;
    return;
  }
  const double mid = 0.5 * (a + b);
  integrate_segment(f, a, mid, 0.5 * tol, depth + 1, out);
  integrate_segment(f, mid, b, 0.5 * tol, depth + 1, out);
}

}  // namespace detail

// Adaptive bisection with a GK15 rule on each segment, to absolute
// tolerance abs_tol.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol) {
  QuadratureResult out;
  auto& fn = f;
  detail::integrate_segment(fn, a, b, abs_tol, 0, out);
  return out;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol);

}  // namespace tnbma
