#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "beamspec/beam_config.hpp"
#include "beamspec/quasi_ode.hpp"

namespace beamspec {

// 2x2 minors m_ij = f_i g_j - f_j g_i of a solution pair (f, g), ordered
// 12, 13, 14, 23, 24, 34. They obey a linear system of their own (the second
// compound), so integrating them directly avoids the cancellation that
// forming them from f and g suffers once both solutions grow alike.
using Minors = std::array<double, 6>;

struct MinorTrajectory {
  std::vector<double> x;
  std::vector<Minors> minors;
  std::vector<double> log_scales;  // true minors = minors[i] * exp(log_scales[i])
};

Minors minors_of(const QuasiState& f, const QuasiState& g);
Minors minor_field(const CoefficientProfile& profile, double lambda, double x, const Minors& m);
MinorTrajectory integrate_minors(const CoefficientProfile& profile, double lambda, double x_from,
                                 double x_to, const Minors& init, IntegrateOptions opts = {});

// Fundamental solutions that satisfy the hinged conditions at the outer end
// of one side: y1, y2 from x = -1 or z1, z2 from x = 1, integrated toward 0.
struct FundamentalSet {
  Side side;
  double lambda;
  CoefficientProfile profile;
  Trajectory first;   // y1 or z1
  Trajectory second;  // y2 or z2
  MinorTrajectory minors;  // of (first, second), same stations

  // Sign invariant: every component of y1, y2 positive on (-1, 0]; pattern
  // (+, -, +, -) for z1, z2 on [0, 1). Checked at every station except the
  // starting endpoint.
  bool sign_invariant_holds = true;
  std::optional<double> first_violation;
};

inline constexpr QuasiState kLeftFirstInit{0.0, 1.0, 0.0, 0.0};
inline constexpr QuasiState kLeftSecondInit{0.0, 0.0, 0.0, 1.0};
inline constexpr QuasiState kRightFirstInit{0.0, -1.0, 0.0, 0.0};
inline constexpr QuasiState kRightSecondInit{0.0, 0.0, 0.0, -1.0};

// lambda >= 0; lambda = 0 is accepted for diagnostics.
FundamentalSet left_fundamental(const BeamSystem& system, double lambda,
                                IntegrateOptions opts = {});
FundamentalSet right_fundamental(const BeamSystem& system, double lambda,
                                 IntegrateOptions opts = {});
FundamentalSet fundamental(const BeamSystem& system, Side side, double lambda,
                           IntegrateOptions opts = {});
// Same construction for a lone profile; the side is taken from the profile.
FundamentalSet fundamental(const CoefficientProfile& profile, double lambda,
                           IntegrateOptions opts = {});

// sigma_bar = f1 f2' - f2 f1', sigma_bar_prime = f1 f2'' - f2 f1'',
// tau_bar = f1 T f2 - f2 T f1. Values are in units of exp(log_scale); the
// *_scale fields hold the magnitude of the two products that cancel.
struct SubwronskianTriple {
  double x = 0.0;
  double lambda = 0.0;
  double sigma_bar = 0.0;
  double sigma_bar_prime = 0.0;
  double tau_bar = 0.0;
  double sigma_bar_scale = 0.0;
  double sigma_bar_prime_scale = 0.0;
  double tau_bar_scale = 0.0;
  double log_scale = 0.0;
};

// Pair of states (f1, f2) at x, in the final-scale units of each trajectory.
struct StatePair {
  QuasiState first;
  QuasiState second;
  double sigma;  // sigma(x), to recover u'' = w3 / sigma
  double log_scale;
};

// x must lie between the starting endpoint and 0. Off-station points are
// reached by integrating from the nearest station.
StatePair states_at(const FundamentalSet& set, double x, double rel_tol = kDefaultRelTol);

// Values from the integrated minors, scales from the trajectories.
SubwronskianTriple subwronskians(const FundamentalSet& set, double x,
                                 double rel_tol = kDefaultRelTol);
// Values and scales formed directly from a pair of states.
SubwronskianTriple subwronskians(const StatePair& pair, double x, double lambda);

// sigma_bar / s, sigma_bar_prime / s^2, tau_bar / s^3 with s = lambda^{1/4}
// (s = 1 at lambda = 0), each divided by the largest of the three magnitudes.
// The weights put the three on a common footing at high frequency.
std::array<double, 3> balanced_subwronskians(const SubwronskianTriple& t);

// |tau_bar - (f1' sigma f2'' - f2' sigma f1'')| with tau_bar from the
// integrated minors and the right side formed from the trajectories, over
// the magnitude of the two products on the right.
double tau_identity_residual(const FundamentalSet& set, double x,
                             double rel_tol = kDefaultRelTol);

}  // namespace beamspec
