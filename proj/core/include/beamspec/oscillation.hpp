#pragma once

#include <array>
#include <optional>
#include <vector>

#include "beamspec/beam_config.hpp"
#include "beamspec/quasi_ode.hpp"
#include "beamspec/spectrum.hpp"

namespace beamspec {

enum class Direction { kForward, kBackward };

struct PositivityResult {
  bool pass = true;
  std::optional<double> first_violation;  // station x
  int component = -1;                     // offending component index
};

// Integrates (sigma u'')'' - (q u')' = weight * rho * u on [a, b] inside the
// profile interval. `init` is the sign-adjusted quadruple: (u, u', sigma u'', T u)
// at a when going forward, (u, -u', sigma u'', -T u) at b when going backward;
// all entries >= 0, not all zero. Passes when the sign-adjusted components stay
// positive at every station past the start (violation: below -1e-12 * |state|).
PositivityResult positivity_propagation(const CoefficientProfile& profile, double a, double b,
                                        double weight, const QuasiState& init,
                                        Direction direction, IntegrateOptions opts = {});

// h solves (sigma h')' = q h with h(a) = 1, h'(a) = 0; t(x) = a + (b - a) / gamma * int_a^x h
// with gamma = int_a^b h. sigma~ = (gamma h / (b - a))^3 sigma, rho~ = gamma rho / ((b - a) h).
struct TransformData {
  double a = 0.0;
  double b = 0.0;
  double gamma = 0.0;
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> h_prime;
  std::vector<double> t;
  std::vector<double> sigma_tilde;
  std::vector<double> rho_tilde;
};

// Throws TheoryViolation if h <= 0 or t fails to increase.
TransformData h_transform(const CoefficientProfile& profile, double a, double b,
                          IntegrateOptions opts = {});

struct TransformResidual {
  // Relative mismatch per image: u, du/dt, sigma~ d2u/dt2, d/dt(sigma~ d2u/dt2).
  std::array<double, 4> per_relation{};
  double max = 0.0;
};

// Integrates u in x, independently integrates the transformed equation in t, and
// compares the transformed state with the images of (u, u', u'', T u).
TransformResidual transform_identity_residuals(const CoefficientProfile& profile, double a,
                                               double b, double weight, const QuasiState& init,
                                               IntegrateOptions opts = {});
double transform_identity_residual(const CoefficientProfile& profile, double a, double b,
                                   double weight, const QuasiState& init,
                                   IntegrateOptions opts = {});

struct InteriorZero {
  double x = 0.0;
  double slope = 0.0;
};

struct ZeroScan {
  std::vector<InteriorZero> zeros;
  double slope_scale = 0.0;  // max |phi'| over the samples
  bool all_simple = true;
};

inline constexpr double kSimpleZeroThreshold = 1e-6;

// Sign-change zeros of an M = 0 mode in (-1, 1) with |phi'| at each.
ZeroScan simple_zero_scan(const BeamSystem& system, const Eigenpair& mode,
                          double threshold = kSimpleZeroThreshold);

enum class BoundaryCase {
  kLeftSlopeMoment,   // u(-1)=u''(-1)=0, alpha u'(0) = beta u''(0); alpha beta <= 0
  kLeftShearDisp,     // u(-1)=u''(-1)=0, alpha T1u(0) = beta u(0); alpha beta <= 0
  kRightSlopeMoment,  // v(1)=v''(1)=0, alpha v'(0) = beta v''(0); alpha beta >= 0
  kRightShearDisp,    // v(1)=v''(1)=0, alpha T2v(0) = beta v(0); alpha beta >= 0
};

struct BoundaryVariant {
  BoundaryCase which;
  double alpha;
  double beta;

  Side side() const;
  // Throws PreconditionError for (0, 0) or a violated sign constraint.
  void validate() const;
};

inline constexpr double kNullityThreshold = 1e-8;

// Dimension of the solution space meeting the three conditions, measured as
// the nullity of the condition at 0 acting on the two fundamental solutions.
// Always >= 1; a value of 2 contradicts the one-dimensionality result.
int dim_check(const CoefficientProfile& profile, double lambda, const BoundaryVariant& variant,
              double zero_threshold = kNullityThreshold, double rel_tol = kDefaultRelTol);

}  // namespace beamspec
