#include "beamspec/fundamental.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "beamspec/detail/adaptive.hpp"
#include "beamspec/errors.hpp"

namespace beamspec {

namespace {

// Sign-adjusted components must be positive: (+,+,+,+) left, (+,-,+,-) right.
bool pattern_holds(Side side, const QuasiState& s) {
  const double sign_odd = side == Side::kLeft ? 1.0 : -1.0;
  return s[kDisp] > 0.0 && sign_odd * s[kSlope] > 0.0 && s[kMoment] > 0.0 &&
         sign_odd * s[kShear] > 0.0;
}

void check_pattern(FundamentalSet& set) {
  for (const Trajectory* t : {&set.first, &set.second}) {
    for (std::size_t i = 1; i < t->size(); ++i) {
      if (!pattern_holds(set.side, t->states[i])) {
        set.sign_invariant_holds = false;
        if (!set.first_violation || std::abs(t->x[i] - t->x.front()) <
                                        std::abs(*set.first_violation - t->x.front()))
          set.first_violation = t->x[i];
        break;
      }
    }
  }
}

enum { k12, k13, k14, k23, k24, k34 };

std::size_t nearest_station(const std::vector<double>& xs, double x) {
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - x) < std::abs(xs[nearest] - x)) nearest = i;
  return nearest;
}

// Minors at x and the log of their unit; off-station points are integrated to.
std::pair<Minors, double> minors_at(const FundamentalSet& set, double x, double rel_tol) {
  const MinorTrajectory& mt = set.minors;
  const std::size_t i = nearest_station(mt.x, x);
  if (std::abs(mt.x[i] - x) <= 1e-14) return {mt.minors[i], mt.log_scales[i]};
  const auto step = integrate_minors(set.profile, set.lambda, mt.x[i], x, mt.minors[i], {rel_tol, 2});
  return {step.minors.back(), mt.log_scales[i] + step.log_scales.back()};
}

}  // namespace

Minors minors_of(const QuasiState& f, const QuasiState& g) {
  auto m = [&](int i, int j) { return f[i] * g[j] - f[j] * g[i]; };
  return {m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3)};
}

Minors minor_field(const CoefficientProfile& profile, double lambda, double x, const Minors& m) {
  const double sigma = profile.sigma_at(x);
  const double q = profile.q_at(x);
  const double lr = lambda * profile.rho_at(x);
  return {m[k13] / sigma,
          m[k23] + q * m[k12] + m[k14],
          m[k24],
          m[k24],
          m[k34] / sigma - lr * m[k12],
          q * m[k24] - lr * m[k13]};
}

MinorTrajectory integrate_minors(const CoefficientProfile& profile, double lambda, double x_from,
                                 double x_to, const Minors& init, IntegrateOptions opts) {
  const Interval iv = profile.interval();
  if (!iv.contains(x_from) || !iv.contains(x_to))
    throw PreconditionError(fmt::format("integration range [{:g}, {:g}] outside the {} interval",
                                        x_from, x_to, to_string(profile.side())));
  if (!(opts.rel_tol >= 1e-13 && opts.rel_tol <= 1e-6))
    throw PreconditionError(fmt::format("rel_tol {:g} outside [1e-13, 1e-6]", opts.rel_tol));
  if (opts.stations < 2) throw PreconditionError("need at least two stations");

  auto rhs = [&profile, lambda](const Minors& m, Minors& dm, double x) {
    dm = minor_field(profile, lambda, x, m);
  };
  detail::StepControl ctl{opts.rel_tol, true, kRescaleThreshold};
  const auto n = static_cast<std::size_t>(opts.stations);
  MinorTrajectory mt;
  mt.x.reserve(n);
  mt.minors.reserve(n);
  mt.log_scales.reserve(n);
  Minors m = init;
  double log_scale = 0.0;
  double dt = 0.0;
  mt.x.push_back(x_from);
  mt.minors.push_back(m);
  mt.log_scales.push_back(0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double xa = mt.x.back();
    const double xb = k + 1 == n ? x_to : x_from + (x_to - x_from) * double(k) / double(n - 1);
    log_scale += detail::advance<6>(rhs, m, xa, xb, ctl, dt);
    mt.x.push_back(xb);
    mt.minors.push_back(m);
    mt.log_scales.push_back(log_scale);
  }
  return mt;
}

FundamentalSet fundamental(const BeamSystem& system, Side side, double lambda,
                           IntegrateOptions opts) {
  return fundamental(system.profile(side), lambda, opts);
}

FundamentalSet fundamental(const CoefficientProfile& profile, double lambda,
                           IntegrateOptions opts) {
  if (!(lambda >= 0.0)) throw PreconditionError(fmt::format("lambda {:g} < 0", lambda));
  const Side side = profile.side();
  const double start = side == Side::kLeft ? -1.0 : 1.0;
  const QuasiState& init1 = side == Side::kLeft ? kLeftFirstInit : kRightFirstInit;
  const QuasiState& init2 = side == Side::kLeft ? kLeftSecondInit : kRightSecondInit;
  FundamentalSet set{side,
                     lambda,
                     profile,
                     integrate_scaled(profile, lambda, start, 0.0, init1, opts),
                     integrate_scaled(profile, lambda, start, 0.0, init2, opts),
                     integrate_minors(profile, lambda, start, 0.0, minors_of(init1, init2), opts),
                     true,
                     std::nullopt};
  check_pattern(set);
  return set;
}

FundamentalSet left_fundamental(const BeamSystem& system, double lambda, IntegrateOptions opts) {
  return fundamental(system, Side::kLeft, lambda, opts);
}

FundamentalSet right_fundamental(const BeamSystem& system, double lambda,
                                 IntegrateOptions opts) {
  return fundamental(system, Side::kRight, lambda, opts);
}

StatePair states_at(const FundamentalSet& set, double x, double rel_tol) {
  const Trajectory& t1 = set.first;
  const Trajectory& t2 = set.second;
  const double lo = std::min(t1.x.front(), t1.x.back());
  const double hi = std::max(t1.x.front(), t1.x.back());
  if (x < lo || x > hi)
    throw DomainError(fmt::format("x={:g} outside the {} interval", x, to_string(set.side)));

  const std::size_t nearest = nearest_station(t1.x, x);
  StatePair pair{t1.relative_state(nearest), t2.relative_state(nearest), set.profile.sigma_at(x),
                 t1.log_scale() + t2.log_scale()};
  if (std::abs(t1.x[nearest] - x) > 1e-14) {
    IntegrateOptions opts{rel_tol, 2};
    const double from = t1.x[nearest];
    auto a = integrate_scaled(set.profile, set.lambda, from, x, pair.first, opts);
    auto b = integrate_scaled(set.profile, set.lambda, from, x, pair.second, opts);
    pair.first = a.final_state();
    pair.second = b.final_state();
    // Every subwronskian term has one factor of each solution.
    pair.log_scale += a.log_scale() + b.log_scale();
  }
  return pair;
}

SubwronskianTriple subwronskians(const StatePair& p, double x, double lambda) {
  const QuasiState& f = p.first;
  const QuasiState& g = p.second;
  const double f2 = f[kMoment] / p.sigma;
  const double g2 = g[kMoment] / p.sigma;
  SubwronskianTriple t;
  t.x = x;
  t.lambda = lambda;
  t.log_scale = p.log_scale;
  t.sigma_bar = f[kDisp] * g[kSlope] - g[kDisp] * f[kSlope];
  t.sigma_bar_prime = f[kDisp] * g2 - g[kDisp] * f2;
  t.tau_bar = f[kDisp] * g[kShear] - g[kDisp] * f[kShear];
  t.sigma_bar_scale = std::abs(f[kDisp] * g[kSlope]) + std::abs(g[kDisp] * f[kSlope]);
  t.sigma_bar_prime_scale = std::abs(f[kDisp] * g2) + std::abs(g[kDisp] * f2);
  t.tau_bar_scale = std::abs(f[kDisp] * g[kShear]) + std::abs(g[kDisp] * f[kShear]);
  return t;
}

SubwronskianTriple subwronskians(const FundamentalSet& set, double x, double rel_tol) {
  const StatePair pair = states_at(set, x, rel_tol);
  SubwronskianTriple t = subwronskians(pair, x, set.lambda);
  const auto [m, log_m] = minors_at(set, x, rel_tol);
  const double unit = std::exp(log_m - pair.log_scale);
  t.sigma_bar = m[k12] * unit;
  t.sigma_bar_prime = m[k13] * unit / pair.sigma;
  t.tau_bar = m[k14] * unit;
  return t;
}

std::array<double, 3> balanced_subwronskians(const SubwronskianTriple& t) {
  const double s = t.lambda > 0.0 ? std::pow(t.lambda, 0.25) : 1.0;
  std::array<double, 3> v{t.sigma_bar / s, t.sigma_bar_prime / (s * s), t.tau_bar / (s * s * s)};
  double top = 0.0;
  for (double w : v) top = std::max(top, std::abs(w));
  if (top > 0.0)
    for (double& w : v) w /= top;
  return v;
}

double tau_identity_residual(const FundamentalSet& set, double x, double rel_tol) {
  const StatePair p = states_at(set, x, rel_tol);
  const double tau = subwronskians(set, x, rel_tol).tau_bar;
  const double a = p.first[kSlope] * p.second[kMoment];
  const double b = p.second[kSlope] * p.first[kMoment];
  const double scale = std::abs(a) + std::abs(b);
  if (scale == 0.0) return std::abs(tau);
  return std::abs(tau - (a - b)) / scale;
}

}  // namespace beamspec
