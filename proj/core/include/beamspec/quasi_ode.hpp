#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "beamspec/beam_config.hpp"

namespace beamspec {

// (u, u', sigma*u'', T u) with T u = (sigma u'')' - q u'.
using QuasiState = std::array<double, 4>;

enum QuasiComponent : std::size_t { kDisp = 0, kSlope = 1, kMoment = 2, kShear = 3 };

inline constexpr double kDefaultRelTol = 1e-10;
inline constexpr double kRescaleThreshold = 1e100;
inline constexpr int kDefaultStations = 65;

// Samples at uniform stations from x_from to x_to inclusive. When scaled
// integration is used the true state at sample i is states[i] * exp(log_scales[i]).
struct Trajectory {
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<QuasiState> states;
  std::vector<double> log_scales;

  std::size_t size() const { return x.size(); }
  const QuasiState& final_state() const { return states.back(); }
  double log_scale() const { return log_scales.back(); }

  // Unscaled state; overflows for very large lambda.
  QuasiState true_state(std::size_t i) const;
  // State in units of the final scale: true_state(i) / exp(log_scale()).
  QuasiState relative_state(std::size_t i) const;
};

// Right-hand side of the first-order quasi-derivative system.
QuasiState vector_field(const CoefficientProfile& profile, double lambda, double x,
                        const QuasiState& s);

struct IntegrateOptions {
  double rel_tol = kDefaultRelTol;
  int stations = kDefaultStations;
};

// x_from and x_to must lie in the profile's closed interval; rel_tol in [1e-13, 1e-6].
Trajectory integrate(const CoefficientProfile& profile, double lambda, double x_from,
                     double x_to, const QuasiState& init, IntegrateOptions opts = {});

// As integrate, but renormalizes to unit max-norm whenever the norm exceeds 1e100.
Trajectory integrate_scaled(const CoefficientProfile& profile, double lambda, double x_from,
                            double x_to, const QuasiState& init, IntegrateOptions opts = {});

}  // namespace beamspec
