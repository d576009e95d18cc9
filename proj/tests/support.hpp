#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "beamspec/beam_config.hpp"
#include "beamspec/errors.hpp"
#include "beamspec/fundamental.hpp"
#include "beamspec/roots.hpp"

namespace beamspec::test {

inline constexpr double kPi = std::numbers::pi;

// (n pi / 2)^4: hinged-hinged uniform beam of length 2.
inline double uniform_eigenvalue(int n) { return std::pow(n * kPi / 2.0, 4); }

inline BeamSystem variable_system(double mass) {
  return BeamSystem{CoefficientProfile(Side::kLeft, {2, 1}, {1, 0, 1}, {1, 1}),
                    CoefficientProfile(Side::kRight, {1, 0, 1}, {2, -1}, {1}), mass};
}

inline const std::vector<double>& shipped_masses() {
  static const std::vector<double> m{0.0, 0.5, 1.0, 10.0};
  return m;
}

struct NamedSystem {
  std::string name;
  BeamSystem system;
};

inline std::vector<NamedSystem> shipped_systems() {
  std::vector<NamedSystem> out;
  for (double m : shipped_masses()) out.push_back({"uniform M=" + std::to_string(m), BeamSystem::uniform(m)});
  for (double m : shipped_masses()) out.push_back({"variable M=" + std::to_string(m), variable_system(m)});
  return out;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Cofactor expansion along the first row; independent of any library solver.
inline double cofactor_det(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  double det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<double>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<double> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    det += (j % 2 == 0 ? 1.0 : -1.0) * a[0][j] * cofactor_det(minor);
  }
  return det;
}

// Random polynomial profile on one side, rejection-sampled until accepted.
inline CoefficientProfile random_profile(std::mt19937_64& rng, Side side) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, 3);
  for (;;) {
    auto poly = [&](double base) {
      Polynomial p(deg(rng) + 1);
      for (double& v : p) v = c(rng);
      p[0] += base;
      return p;
    };
    CoefficientProfile p(side, poly(1.5), poly(1.5), poly(0.5));
    try {
      p.validate();
      return p;
    } catch (const ConstraintError&) {
    }
  }
}

// Nonnegative quadruple with at least one positive entry.
inline QuasiState random_init(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution keep(0.6);
  QuasiState s{};
  while (std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; }))
    for (double& v : s) v = keep(rng) ? u(rng) : 0.0;
  return s;
}

struct VanishingProbe {
  Side side;
  double x;
  double lambda;
  int which;                      // quantity that vanishes
  std::array<double, 3> values;   // balanced values at the probe
};

// Balanced (sigma_bar, sigma_bar', tau_bar) from a vector of minors at x.
inline std::array<double, 3> balanced_from_minors(const CoefficientProfile& p, double x,
                                                  double lambda, const Minors& m) {
  SubwronskianTriple t;
  t.x = x;
  t.lambda = lambda;
  t.sigma_bar = m[0];
  t.sigma_bar_prime = m[1] / p.sigma_at(x);
  t.tau_bar = m[2];
  return balanced_subwronskians(t);
}

// Locates zeros in lambda = s^4 of each subwronskian at 16 fixed stations per
// side of each system, then returns `count` probes spread over everything found.
inline std::vector<VanishingProbe> vanishing_probes(const std::vector<BeamSystem>& systems,
                                                    std::size_t count, double s_max = 20.0) {
  constexpr int kOffsets = 16;
  constexpr double kTol = 1e-11;
  struct Found {
    const CoefficientProfile* profile;
    double x;
    double s;
    int which;
  };
  auto start_of = [](const CoefficientProfile& p) { return p.side() == Side::kLeft ? -1.0 : 1.0; };
  auto init_of = [](const CoefficientProfile& p) {
    return p.side() == Side::kLeft ? minors_of(kLeftFirstInit, kLeftSecondInit)
                                   : minors_of(kRightFirstInit, kRightSecondInit);
  };
  auto at = [&](const CoefficientProfile& p, double x, double s) {
    const double lambda = s * s * s * s;
    const auto mt = integrate_minors(p, lambda, start_of(p), x, init_of(p), {kTol, 2});
    return balanced_from_minors(p, x, lambda, mt.minors.back());
  };

  std::vector<Found> found;
  for (const BeamSystem& sys : systems) {
    for (Side side : {Side::kLeft, Side::kRight}) {
      const CoefficientProfile& p = sys.profile(side);
      // Stations k/16 from the outer end, k = 1..16, on a 65-point grid.
      auto sample = [&](double s) {
        const double lambda = s * s * s * s;
        const auto mt = integrate_minors(p, lambda, start_of(p), 0.0, init_of(p), {kTol, 4 * kOffsets + 1});
        std::vector<std::array<double, 3>> v;
        for (int k = 1; k <= kOffsets; ++k)
          v.push_back(balanced_from_minors(p, mt.x[4 * k], lambda, mt.minors[4 * k]));
        return v;
      };
      double s_prev = 0.3;
      auto prev = sample(s_prev);
      for (double s = 0.35; s <= s_max; s += 0.05) {
        const auto cur = sample(s);
        for (int k = 0; k < kOffsets; ++k) {
          const double x = start_of(p) * (1.0 - double(k + 1) / kOffsets);
          for (int w = 0; w < 3; ++w) {
            if ((prev[k][w] > 0) == (cur[k][w] > 0)) continue;
            const double root = find_root([&](double z) { return at(p, x, z)[w]; }, s_prev, s,
                                          prev[k][w], cur[k][w], 1e-15);
            found.push_back({&p, x, root, w});
          }
        }
        prev = cur;
        s_prev = s;
      }
    }
  }
  std::vector<VanishingProbe> out;
  if (found.size() < count) return out;
  for (std::size_t k = 0; k < count; ++k) {
    const Found& f = found[k * found.size() / count];
    out.push_back({f.profile->side(), f.x, f.s * f.s * f.s * f.s, f.which, at(*f.profile, f.x, f.s)});
  }
  return out;
}

}  // namespace beamspec::test
