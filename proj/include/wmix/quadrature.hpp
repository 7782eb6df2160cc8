#pragma once

#include <cmath>
#include <stdexcept>

#include "wmix/measure.hpp"

namespace wmix {

struct QuadratureFailure : Error { using Error::Error; };

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol,
                            int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0) throw QuadratureFailure("adaptive quadrature: depth exhausted");
  if (std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a,b] to absolute tolerance tol.  The interval is
/// pre-split into panels so narrow features away from the midpoint are not
/// missed by the first subdivision test.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-8,
                 int panels = 16) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    double x0 = a + i * h, x1 = a + (i + 1) * h;
    double m = 0.5 * (x0 + x1);
    double f0 = f(x0), fm = f(m), f1 = f(x1);
    double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += detail::adaptive_simpson_rec(f, x0, x1, f0, fm, f1, whole,
                                          tol / panels, 48);
  }
  return total;
}

}  // namespace wmix
