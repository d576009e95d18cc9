#pragma once

// Adaptive one-step driver shared by every integrator in the library.
// Backed by the Fehlberg 7(8) embedded pair from Boost.Odeint; the step
// loop is ours so that step underflow and state rescaling can be handled.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "beamspec/errors.hpp"

namespace beamspec::detail {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
  double rel_tol = 1e-10;
  bool rescale = false;
  double rescale_threshold = 1e100;
};

template <std::size_t N>
double max_norm(const State<N>& y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

// Advances y from x0 to x1 (either direction). dt carries the step-size
// guess between calls. Returns the log of the factor removed from y by
// rescaling, so that the true state is y * exp(result).
template <std::size_t N, class Rhs>
double advance(const Rhs& rhs, State<N>& y, double x0, double x1, const StepControl& ctl,
               double& dt) {
  namespace odeint = boost::numeric::odeint;
  using Stepper = odeint::runge_kutta_fehlberg78<State<N>>;
  using Checker = odeint::default_error_checker<double, typename Stepper::algebra_type,
                                                odeint::default_operations>;
  using Controlled = odeint::controlled_runge_kutta<Stepper, Checker>;

  double log_scale = 0.0;
  if (x0 == x1) return log_scale;
  double norm = max_norm(y);
  if (norm == 0.0) return log_scale;  // linear homogeneous: stays zero

  const double span = std::abs(x1 - x0);
  const double direction = x1 > x0 ? 1.0 : -1.0;
  const double min_step = 1e-14 * std::max(1.0, span);
  if (dt == 0.0 || (dt > 0.0) != (direction > 0.0)) dt = direction * span / 8.0;

  auto system = [&rhs](const State<N>& s, State<N>& ds, double x) { rhs(s, ds, x); };

  double x = x0;
  int rejected = 0;
  while (direction * (x1 - x) > 0.0) {
    Controlled stepper(Checker(ctl.rel_tol * norm, ctl.rel_tol, 1.0, 0.0));
    double h = dt;
    bool last = false;
    if (direction * (x + h - x1) >= 0.0) {
      h = x1 - x;
      last = true;
    }
    if (stepper.try_step(system, y, x, h) == odeint::success) {
      rejected = 0;
      if (last) x = x1;  // hit the station exactly
      // keep the grown step unless the step was clipped to the station
      dt = last ? (std::abs(h) > std::abs(dt) ? h : dt) : h;
      norm = max_norm(y);
      if (!std::isfinite(norm)) throw StiffnessError("non-finite state", x);
      if (ctl.rescale && norm > ctl.rescale_threshold) {
        for (double& v : y) v /= norm;
        log_scale += std::log(norm);
        norm = 1.0;
      }
    } else {
      dt = h;
      if (std::abs(dt) < min_step || ++rejected > 200)
        throw StiffnessError("step size underflow", x);
    }
  }
  return log_scale;
}

}  // namespace beamspec::detail
