#include "beamspec/quasi_ode.hpp"

#include <cmath>

#include <fmt/format.h>

#include "beamspec/detail/adaptive.hpp"
#include "beamspec/errors.hpp"

namespace beamspec {

QuasiState Trajectory::true_state(std::size_t i) const {
  QuasiState s = states[i];
  const double f = std::exp(log_scales[i]);
  for (double& v : s) v *= f;
  return s;
}

QuasiState Trajectory::relative_state(std::size_t i) const {
  QuasiState s = states[i];
  const double f = std::exp(log_scales[i] - log_scale());
  for (double& v : s) v *= f;
  return s;
}

QuasiState vector_field(const CoefficientProfile& profile, double lambda, double x,
                        const QuasiState& s) {
  if (!profile.interval().contains(x))
    throw DomainError(fmt::format("x={:g} outside the {} interval", x,
                                  to_string(profile.side())));
  return {s[kSlope], s[kMoment] / profile.sigma_at(x), s[kShear] + profile.q_at(x) * s[kSlope],
          lambda * profile.rho_at(x) * s[kDisp]};
}

namespace {

Trajectory run(const CoefficientProfile& profile, double lambda, double x_from, double x_to,
               const QuasiState& init, const IntegrateOptions& opts, bool rescale) {
  const Interval iv = profile.interval();
  if (!iv.contains(x_from) || !iv.contains(x_to))
    throw PreconditionError(fmt::format("integration range [{:g}, {:g}] outside the {} interval",
                                  x_from, x_to, to_string(profile.side())));
  if (!(opts.rel_tol >= 1e-13 && opts.rel_tol <= 1e-6))
    throw PreconditionError(fmt::format("rel_tol {:g} outside [1e-13, 1e-6]", opts.rel_tol));
  if (opts.stations < 2) throw PreconditionError("need at least two stations");

  auto rhs = [&profile, lambda](const QuasiState& s, QuasiState& ds, double x) {
    ds = {s[kSlope], s[kMoment] / profile.sigma_at(x), s[kShear] + profile.q_at(x) * s[kSlope],
          lambda * profile.rho_at(x) * s[kDisp]};
  };

  detail::StepControl ctl{opts.rel_tol, rescale, kRescaleThreshold};
  Trajectory traj;
  traj.lambda = lambda;
  const auto n = static_cast<std::size_t>(opts.stations);
  traj.x.reserve(n);
  traj.states.reserve(n);
  traj.log_scales.reserve(n);

  QuasiState y = init;
  double log_scale = 0.0;
  double dt = 0.0;
  traj.x.push_back(x_from);
  traj.states.push_back(y);
  traj.log_scales.push_back(0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double xa = traj.x.back();
    const double xb = k + 1 == n ? x_to : x_from + (x_to - x_from) * double(k) / double(n - 1);
    log_scale += detail::advance<4>(rhs, y, xa, xb, ctl, dt);
    traj.x.push_back(xb);
    traj.states.push_back(y);
    traj.log_scales.push_back(log_scale);
  }
  return traj;
}

}  // namespace

Trajectory integrate(const CoefficientProfile& profile, double lambda, double x_from,
                     double x_to, const QuasiState& init, IntegrateOptions opts) {
  return run(profile, lambda, x_from, x_to, init, opts, false);
}

Trajectory integrate_scaled(const CoefficientProfile& profile, double lambda, double x_from,
                            double x_to, const QuasiState& init, IntegrateOptions opts) {
  return run(profile, lambda, x_from, x_to, init, opts, true);
}

}  // namespace beamspec
