#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "beamspec/errors.hpp"
#include "beamspec/quasi_ode.hpp"
#include "support.hpp"

namespace beamspec {
namespace {

const CoefficientProfile kLeft = CoefficientProfile::uniform(Side::kLeft);
const CoefficientProfile kRight = CoefficientProfile::uniform(Side::kRight);

void expect_state_near(const QuasiState& got, const QuasiState& want, double tol) {
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(got[k], want[k], tol) << "component " << k;
}

TEST(VectorField, Examples) {
  expect_state_near(vector_field(kLeft, 0.0, -0.5, {0, 1, 0, 0}), {1, 0, 0, 0}, 0.0);
  expect_state_near(vector_field(kLeft, 1.0, -0.2, {1, 0, 0, 0}), {0, 0, 0, 1}, 0.0);
  const CoefficientProfile axial(Side::kRight, {1}, {1}, {2});
  expect_state_near(vector_field(axial, 0.0, 0.4, {0, 1, 3, 5}), {1, 3, 7, 0}, 0.0);
}

TEST(VectorField, UsesPointValuesOnly) {
  const CoefficientProfile p(Side::kLeft, {2, 1}, {1, 0, 1}, {1, 1});
  const double x = -0.25;
  const QuasiState d = vector_field(p, 3.0, x, {1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(d[0], 2.0);
  EXPECT_DOUBLE_EQ(d[1], 3.0 / (1 + x * x));
  EXPECT_DOUBLE_EQ(d[2], 4.0 + (1 + x) * 2.0);
  EXPECT_DOUBLE_EQ(d[3], 3.0 * (2 + x) * 1.0);
}

TEST(VectorField, DomainError) {
  EXPECT_THROW(vector_field(kLeft, 0.0, 0.5, {0, 0, 0, 0}), DomainError);
}

TEST(Integrate, LinearPolynomialAtZeroLambda) {
  const Trajectory t = integrate(kLeft, 0.0, -1.0, 0.0, {0, 1, 0, 0});
  expect_state_near(t.final_state(), {1, 1, 0, 0}, 1e-12);
}

TEST(Integrate, CubicPolynomialAtZeroLambda) {
  const Trajectory t = integrate(kLeft, 0.0, -1.0, 0.0, {0, 0, 0, 1});
  expect_state_near(t.final_state(), {1.0 / 6, 0.5, 1, 1}, 1e-12);
  // Every station: u = (x+1)^3/6.
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double xi = t.x[i] + 1.0;
    EXPECT_NEAR(t.states[i][kDisp], xi * xi * xi / 6.0, 1e-12);
  }
}

TEST(Integrate, ZeroInitialStateStaysZero) {
  const CoefficientProfile p(Side::kRight, {1, 0, 1}, {2, -1}, {1});
  const Trajectory t = integrate(p, 250.0, 1.0, 0.0, {0, 0, 0, 0});
  for (const auto& s : t.states)
    for (double v : s) EXPECT_EQ(v, 0.0);
}

TEST(Integrate, StationsAreUniformAndMonotone) {
  const Trajectory t = integrate(kRight, 5.0, 1.0, 0.0, {0, -1, 0, 0}, {1e-10, 65});
  ASSERT_EQ(t.size(), 65u);
  EXPECT_EQ(t.x.front(), 1.0);
  EXPECT_EQ(t.x.back(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    EXPECT_LT(t.x[i], t.x[i - 1]);
    EXPECT_NEAR(t.x[i - 1] - t.x[i], 1.0 / 64, 1e-15);
  }
}

TEST(Integrate, Preconditions) {
  EXPECT_THROW(integrate(kLeft, 1.0, -1.0, 0.5, {0, 1, 0, 0}), PreconditionError);
  EXPECT_THROW(integrate(kLeft, 1.0, -1.0, 0.0, {0, 1, 0, 0}, {1e-5, 65}), PreconditionError);
  EXPECT_THROW(integrate(kLeft, 1.0, -1.0, 0.0, {0, 1, 0, 0}, {1e-14, 65}), PreconditionError);
}

TEST(Integrate, ClosedFormUniformMode) {
  // u'''' = lambda u, u(-1)=0, u'(-1)=1, u''(-1)=0, u'''(-1)=0:
  // u = (sinh(s xi) + sin(s xi)) / (2 s), xi = x + 1.
  const double lambda = 200.0, s = std::pow(lambda, 0.25);
  const Trajectory t = integrate(kLeft, lambda, -1.0, 0.0, {0, 1, 0, 0});
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double xi = t.x[i] + 1.0;
    const double u = (std::sinh(s * xi) + std::sin(s * xi)) / (2 * s);
    const double du = (std::cosh(s * xi) + std::cos(s * xi)) / 2;
    const double d2 = s * (std::sinh(s * xi) - std::sin(s * xi)) / 2;
    const double d3 = s * s * (std::cosh(s * xi) - std::cos(s * xi)) / 2;
    // With sigma = 1 and q = 0 the moment is u'' and the quasi-shear is u'''.
    const QuasiState w = t.states[i];
    EXPECT_NEAR(w[kDisp], u, 1e-9 * std::max(1.0, std::abs(u)));
    EXPECT_NEAR(w[kSlope], du, 1e-9 * std::max(1.0, std::abs(du)));
    EXPECT_NEAR(w[kMoment], d2, 1e-9 * std::max(1.0, std::abs(d2)));
    EXPECT_NEAR(w[kShear], d3, 1e-9 * std::max(1.0, std::abs(d3)));
  }
}

TEST(Integrate, ClosedFormWithAxialForce) {
  // sigma = q = 1, lambda = 0, init (0, 0, 1, 0): u = cosh x - 1 and T u = u''' - u' = 0.
  const CoefficientProfile p(Side::kRight, {1}, {1}, {1});
  const Trajectory t = integrate(p, 0.0, 0.0, 1.0, {0, 0, 1, 0});
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t.x[i];
    expect_state_near(t.states[i], {std::cosh(x) - 1, std::sinh(x), std::cosh(x), 0.0}, 1e-11);
  }
}

TEST(IntegrateScaled, NoRescaleForModerateLambda) {
  for (double lambda : {0.0, 1.0, 50.0, 1e4}) {
    const Trajectory a = integrate(kLeft, lambda, -1.0, 0.0, {0, 0, 0, 1});
    const Trajectory b = integrate_scaled(kLeft, lambda, -1.0, 0.0, {0, 0, 0, 1});
    EXPECT_EQ(b.log_scale(), 0.0);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(a.final_state()[k], b.final_state()[k]);
  }
}

TEST(IntegrateScaled, LargeLambdaMatchesClosedFormGrowth) {
  // lambda = 1e12, s = 1000: each component ~ s^k e^s / 4 at x = 0.
  const double lambda = 1e12, s = 1000.0;
  const Trajectory t = integrate_scaled(kLeft, lambda, -1.0, 0.0, {0, 1, 0, 0});
  EXPECT_GT(t.log_scale(), 0.0);
  const QuasiState w = t.final_state();
  for (int k = 0; k < 4; ++k) {
    const double log_true = t.log_scale() + std::log(w[k]);
    const double log_want = s + (k - 1) * std::log(s) - std::log(4.0);
    EXPECT_NEAR(log_true, log_want, 1e-8 * log_want) << "component " << k;
  }
}

TEST(IntegrateScaled, RelativeStatesAreConsistent) {
  const Trajectory t = integrate_scaled(kRight, 3e9, 1.0, 0.0, {0, 0, 0, -1});
  ASSERT_GT(t.log_scale(), 0.0);
  const QuasiState last = t.relative_state(t.size() - 1);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(last[k], t.final_state()[k]);
  // Log scales are nondecreasing along the trajectory.
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t.log_scales[i], t.log_scales[i - 1]);
}

TEST(Integrate, Superposition) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CoefficientProfile p(Side::kLeft, {2, 1}, {1, 0, 1}, {1, 1});
  for (double lambda : {0.0, 3.0, 400.0, 1e6}) {
    QuasiState a{}, b{};
    for (int k = 0; k < 4; ++k) {
      a[k] = u(rng);
      b[k] = u(rng);
    }
    const double alpha = 0.7, beta = -1.3;
    QuasiState c{};
    for (int k = 0; k < 4; ++k) c[k] = alpha * a[k] + beta * b[k];
    const auto ta = integrate_scaled(p, lambda, -1.0, 0.0, a);
    const auto tb = integrate_scaled(p, lambda, -1.0, 0.0, b);
    const auto tc = integrate_scaled(p, lambda, -1.0, 0.0, c);
    const double ea = std::exp(ta.log_scale() - tc.log_scale());
    const double eb = std::exp(tb.log_scale() - tc.log_scale());
    double norm = 0.0;
    for (double v : tc.final_state()) norm = std::max(norm, std::abs(v));
    for (int k = 0; k < 4; ++k) {
      const double combo = alpha * ta.final_state()[k] * ea + beta * tb.final_state()[k] * eb;
      EXPECT_NEAR(tc.final_state()[k], combo, 1e-9 * norm) << "lambda " << lambda;
    }
  }
}

TEST(Integrate, SelfConvergence) {
  const CoefficientProfile p(Side::kRight, {1, 0, 1}, {2, -1}, {1});
  for (double lambda : {1.0, 1000.0}) {
    double prev_tol = 1e-6;
    QuasiState prev = integrate(p, lambda, 1.0, 0.0, {0, -1, 0, 0}, {prev_tol, 65}).final_state();
    for (double tol = prev_tol / 2; tol >= 1e-12; tol /= 2) {
      const QuasiState cur = integrate(p, lambda, 1.0, 0.0, {0, -1, 0, 0}, {tol, 65}).final_state();
      double norm = 0.0, diff = 0.0;
      for (int k = 0; k < 4; ++k) {
        norm = std::max(norm, std::abs(cur[k]));
        diff = std::max(diff, std::abs(cur[k] - prev[k]));
      }
      EXPECT_LT(diff, prev_tol * norm) << "tol " << tol;
      prev = cur;
      prev_tol = tol;
    }
  }
}

TEST(Integrate, AccurateAgainstHundredfoldTighterRun) {
  const CoefficientProfile p(Side::kLeft, {2, 1}, {1, 0, 1}, {1, 1});
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    const QuasiState a = integrate(p, 500.0, -1.0, 0.0, {0, 0, 0, 1}, {tol, 65}).final_state();
    const QuasiState b = integrate(p, 500.0, -1.0, 0.0, {0, 0, 0, 1}, {tol / 100, 65}).final_state();
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], tol * std::abs(b[k]));
  }
}

}  // namespace
}  // namespace beamspec
