#include "beamspec/oscillation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "beamspec/detail/adaptive.hpp"
#include "beamspec/errors.hpp"
#include "beamspec/fundamental.hpp"

namespace beamspec {

namespace {

void require_subinterval(const CoefficientProfile& profile, double a, double b) {
  const Interval iv = profile.interval();
  if (!(a < b) || !iv.contains(a) || !iv.contains(b))
    throw PreconditionError(fmt::format("[{:g}, {:g}] is not a subinterval of the {} interval",
                                        a, b, to_string(profile.side())));
}

std::vector<double> stations(double from, double to, int count) {
  std::vector<double> x(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    x[k] = k + 1 == count ? to : from + (to - from) * double(k) / double(count - 1);
  return x;
}

}  // namespace

PositivityResult positivity_propagation(const CoefficientProfile& profile, double a, double b,
                                        double weight, const QuasiState& init,
                                        Direction direction, IntegrateOptions opts) {
  require_subinterval(profile, a, b);
  if (!(weight > 0.0)) throw PreconditionError("weight must be positive");
  bool all_zero = true;
  for (double v : init) {
    if (v < 0.0) throw PreconditionError("initial quadruple must be nonnegative");
    if (v != 0.0) all_zero = false;
  }
  if (all_zero) throw PreconditionError("initial quadruple is all zero");

  // Backward: odd components (slope, shear) carry a sign flip.
  const double odd = direction == Direction::kForward ? 1.0 : -1.0;
  const QuasiState start{init[0], odd * init[1], init[2], odd * init[3]};
  const Trajectory traj = direction == Direction::kForward
                              ? integrate_scaled(profile, weight, a, b, start, opts)
                              : integrate_scaled(profile, weight, b, a, start, opts);

  PositivityResult res;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const QuasiState& s = traj.states[i];
    const double tol = 1e-12 * detail::max_norm<4>(s);
    const QuasiState adj{s[0], odd * s[1], s[2], odd * s[3]};
    for (int k = 0; k < 4; ++k) {
      if (adj[k] < -tol) {
        res.pass = false;
        res.first_violation = traj.x[i];
        res.component = k;
        return res;
      }
    }
  }
  return res;
}

TransformData h_transform(const CoefficientProfile& profile, double a, double b,
                          IntegrateOptions opts) {
  require_subinterval(profile, a, b);
  if (opts.stations < 2) throw PreconditionError("need at least two stations");
  TransformData td;
  td.a = a;
  td.b = b;
  td.x = stations(a, b, opts.stations);
  const std::size_t n = td.x.size();
  td.h.resize(n);
  td.h_prime.resize(n);
  td.t.resize(n);
  std::vector<double> integral(n, 0.0);

  if (profile.is_q_zero()) {
    std::fill(td.h.begin(), td.h.end(), 1.0);
    std::fill(td.h_prime.begin(), td.h_prime.end(), 0.0);
    td.gamma = b - a;
    td.t = td.x;
  } else {
    // (h, sigma h', int_a^x h)
    auto rhs = [&profile](const detail::State<3>& y, detail::State<3>& dy, double x) {
      dy = {y[1] / profile.sigma_at(x), profile.q_at(x) * y[0], y[0]};
    };
    detail::State<3> y{1.0, 0.0, 0.0};
    detail::StepControl ctl{opts.rel_tol, false};
    double dt = 0.0;
    td.h[0] = 1.0;
    td.h_prime[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      detail::advance<3>(rhs, y, td.x[k - 1], td.x[k], ctl, dt);
      td.h[k] = y[0];
      td.h_prime[k] = y[1] / profile.sigma_at(td.x[k]);
      integral[k] = y[2];
    }
    td.gamma = integral.back();
    for (std::size_t k = 0; k < n; ++k) td.t[k] = a + (b - a) * integral[k] / td.gamma;
    td.t.back() = b;
  }

  if (!(td.gamma > 0.0)) throw TheoryViolation("gamma is not positive");
  const double k = td.gamma / (b - a);
  td.sigma_tilde.resize(n);
  td.rho_tilde.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(td.h[i] > 0.0))
      throw TheoryViolation(fmt::format("h vanishes or turns negative at x={:g}", td.x[i]));
    if (i > 0 && !(td.t[i] > td.t[i - 1]))
      throw TheoryViolation(fmt::format("t fails to increase at x={:g}", td.x[i]));
    const double hk = td.h[i] / k;
    td.sigma_tilde[i] = hk * hk * hk * profile.sigma_at(td.x[i]);
    td.rho_tilde[i] = k * profile.rho_at(td.x[i]) / td.h[i];
  }
  return td;
}

TransformResidual transform_identity_residuals(const CoefficientProfile& profile, double a,
                                               double b, double weight, const QuasiState& init,
                                               IntegrateOptions opts) {
  if (!(weight >= 0.0)) throw PreconditionError("weight must be nonnegative");
  const TransformData td = h_transform(profile, a, b, opts);
  const Trajectory u = integrate(profile, weight, a, b, init, opts);
  const double k = td.gamma / (b - a);

  // Transformed equation in t, carried together with x(t), h and sigma h'
  // so that sigma~ and rho~ are evaluated along the way.
  enum { kU, kDu, kM, kDm, kX, kH, kP };
  auto rhs = [&profile, k, weight](const detail::State<7>& y, detail::State<7>& dy, double) {
    const double x = y[kX];
    const double h = y[kH];
    const double dxdt = k / h;
    const double hk = h / k;
    const double sigma_t = hk * hk * hk * profile.sigma_at(x);
    const double rho_t = k * profile.rho_at(x) / h;
    dy[kU] = y[kDu];
    dy[kDu] = y[kM] / sigma_t;
    dy[kM] = y[kDm];
    dy[kDm] = weight * rho_t * y[kU];
    dy[kX] = dxdt;
    dy[kH] = y[kP] / profile.sigma_at(x) * dxdt;
    dy[kP] = profile.q_at(x) * h * dxdt;
  };
  detail::State<7> y{init[kDisp], k * init[kSlope], init[kMoment] / k, init[kShear], a, 1.0, 0.0};
  detail::StepControl ctl{opts.rel_tol, false};
  double dt = 0.0;

  TransformResidual res;
  for (std::size_t i = 0; i < td.x.size(); ++i) {
    if (i > 0) detail::advance<7>(rhs, y, td.t[i - 1], td.t[i], ctl, dt);
    const QuasiState& w = u.states[i];
    const double h = td.h[i];
    const double p = td.h_prime[i] * profile.sigma_at(td.x[i]);
    const std::array<double, 4> image{w[kDisp], k * w[kSlope] / h,
                                      (h * w[kMoment] - w[kSlope] * p) / k, w[kShear]};
    const std::array<double, 4> got{y[kU], y[kDu], y[kM], y[kDm]};
    double scale = 0.0;
    for (double v : image) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) continue;
    for (int c = 0; c < 4; ++c)
      res.per_relation[c] = std::max(res.per_relation[c], std::abs(got[c] - image[c]) / scale);
  }
  for (double r : res.per_relation) res.max = std::max(res.max, r);
  return res;
}

double transform_identity_residual(const CoefficientProfile& profile, double a, double b,
                                   double weight, const QuasiState& init,
                                   IntegrateOptions opts) {
  return transform_identity_residuals(profile, a, b, weight, init, opts).max;
}

namespace {

struct HermiteSegment {
  double x0, x1, f0, f1, d0, d1;

  double value(double x) const {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 +
           (t3 - t2) * h * d1;
  }

  double slope(double x) const {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * f0 + (-6 * t2 + 6 * t) * f1) / h + (3 * t2 - 4 * t + 1) * d0 +
           (3 * t2 - 2 * t) * d1;
  }
};

}  // namespace

ZeroScan simple_zero_scan(const BeamSystem& system, const Eigenpair& mode, double threshold) {
  if (system.mass != 0.0) throw PreconditionError("simple_zero_scan needs M = 0");
  std::vector<double> x = mode.left_x;
  std::vector<QuasiState> s = mode.left_states;
  x.insert(x.end(), mode.right_x.begin() + 1, mode.right_x.end());
  s.insert(s.end(), mode.right_states.begin() + 1, mode.right_states.end());

  ZeroScan scan;
  for (const QuasiState& q : s) scan.slope_scale = std::max(scan.slope_scale, std::abs(q[kSlope]));
  // Endpoint samples are zero by construction and are skipped.
  for (std::size_t i = 1; i + 2 < x.size(); ++i) {
    const double f0 = s[i][kDisp];
    const double f1 = s[i + 1][kDisp];
    if (!((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0) || f1 == 0.0)) continue;
    HermiteSegment seg{x[i], x[i + 1], f0, f1, s[i][kSlope], s[i + 1][kSlope]};
    double lo = seg.x0;
    double hi = seg.x1;
    double flo = f0;
    for (int it = 0; it < 80 && f1 != 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = seg.value(mid);
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double root = f1 == 0.0 ? seg.x1 : 0.5 * (lo + hi);
    const InteriorZero z{root, seg.slope(root)};
    if (!(std::abs(z.slope) > threshold * scan.slope_scale)) scan.all_simple = false;
    scan.zeros.push_back(z);
  }
  return scan;
}

Side BoundaryVariant::side() const {
  return which == BoundaryCase::kLeftSlopeMoment || which == BoundaryCase::kLeftShearDisp
             ? Side::kLeft
             : Side::kRight;
}

void BoundaryVariant::validate() const {
  if (alpha == 0.0 && beta == 0.0) throw PreconditionError("(alpha, beta) = (0, 0) is excluded");
  if (side() == Side::kLeft && alpha * beta > 0.0)
    throw PreconditionError("left variants need alpha * beta <= 0");
  if (side() == Side::kRight && alpha * beta < 0.0)
    throw PreconditionError("right variants need alpha * beta >= 0");
}

int dim_check(const CoefficientProfile& profile, double lambda, const BoundaryVariant& variant,
              double zero_threshold, double rel_tol) {
  variant.validate();
  if (variant.side() != profile.side())
    throw PreconditionError("boundary variant and profile are on different sides");
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be positive");

  const FundamentalSet set = fundamental(profile, lambda, IntegrateOptions{rel_tol, 2});
  const double sigma0 = profile.sigma_at(0.0);
  const bool slope_moment = variant.which == BoundaryCase::kLeftSlopeMoment ||
                            variant.which == BoundaryCase::kRightSlopeMoment;
  int zero_entries = 0;
  for (const Trajectory* t : {&set.first, &set.second}) {
    const QuasiState& w = t->final_state();
    // alpha f - beta g for (f, g) = (u', u'') or (T u, u).
    const double f = slope_moment ? w[kSlope] : w[kShear];
    const double g = slope_moment ? w[kMoment] / sigma0 : w[kDisp];
    const double entry = variant.alpha * f - variant.beta * g;
    const double scale = std::abs(variant.alpha * f) + std::abs(variant.beta * g);
    if (std::abs(entry) <= zero_threshold * scale) ++zero_entries;
  }
  return zero_entries == 2 ? 2 : 1;
}

}  // namespace beamspec
