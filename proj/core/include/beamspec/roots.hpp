#pragma once

#include <cmath>
#include <utility>

#include "beamspec/errors.hpp"

namespace beamspec {

// Bracketed root of a continuous function: Illinois-modified false position
// with a bisection step whenever the bracket fails to halve in two steps.
// Stops when the bracket width is below rel_tol * |x| (or abs_floor).
template <class F>
double find_root(F&& f, double a, double b, double fa, double fb, double rel_tol,
                 double abs_floor = 0.0, int max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw BracketError("function has the same sign at both ends");
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  int side = 0;  // which end was retained last (-1 left, +1 right)
  double width_before = b - a;
  for (int it = 0; it < max_iter; ++it) {
    const double width = b - a;
    if (width <= std::max(rel_tol * std::max(std::abs(a), std::abs(b)), abs_floor)) break;
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b) || (it % 2 == 1 && width > 0.5 * width_before)) {
      c = 0.5 * (a + b);
    }
    if (it % 2 == 1) width_before = width;
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc > 0.0) == (fa > 0.0)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == +1) fa *= 0.5;
      side = +1;
    }
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

}  // namespace beamspec
