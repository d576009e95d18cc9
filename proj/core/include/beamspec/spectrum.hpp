#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "beamspec/beam_config.hpp"
#include "beamspec/fundamental.hpp"
#include "beamspec/quasi_ode.hpp"

namespace beamspec {

// Rows: R1 u-v, R2 u'-v', R3 sigma1 u'' - sigma2 v'', R4 T1u - T2v + M lambda u,
// all at x = 0. Columns: coefficients of y1, y2, z1, z2. Column j of the
// true matrix is values.col(j) * exp(log_offsets[j]).
struct InterfaceMatrix {
  double lambda = 0.0;
  Eigen::Matrix4d values = Eigen::Matrix4d::Zero();
  std::array<double, 4> log_offsets{};

  Eigen::Matrix4d true_values() const;
  // Rows scaled by 1, 1/s, 1/s^2, 1/s^3 (s = max(1, lambda^{1/4})); then the
  // left pair and the right pair of columns each replaced by an orthonormal
  // basis of their span. Singular values then measure the principal angles
  // between the two solution planes and |det| <= 1. If `to_values` is given it
  // receives T with values * T = diag(weights)^{-1} * balanced, so a null
  // vector nu of the balanced matrix maps to the coefficients T * nu.
  Eigen::Matrix4d balanced(Eigen::Matrix4d* to_values = nullptr) const;
};

InterfaceMatrix interface_matrix(const BeamSystem& system, double lambda,
                                 double rel_tol = kDefaultRelTol);
InterfaceMatrix interface_matrix(const BeamSystem& system, const FundamentalSet& left,
                                 const FundamentalSet& right);

// Determinant in sign/log form. lambda == s^4 as computed from s.
struct DeterminantSample {
  double s = 0.0;
  double lambda = 0.0;
  int sign = 0;
  double log_abs = 0.0;
  std::optional<double> derivative;  // d/ds of the balanced determinant

  double value() const;                      // may overflow for large lambda
  double value_relative(double log_ref) const;  // sign * exp(log_abs - log_ref)
};

DeterminantSample char_det(const BeamSystem& system, double lambda,
                           double rel_tol = kDefaultRelTol);
DeterminantSample char_det_at_s(const BeamSystem& system, double s,
                                double rel_tol = kDefaultRelTol);

// Determinant of InterfaceMatrix::balanced(), bounded by 1 in magnitude.
double balanced_det_at_s(const BeamSystem& system, double s, double rel_tol = kDefaultRelTol);

struct Bracket {
  DeterminantSample lo;
  DeterminantSample hi;
};

inline constexpr double kDefaultScanStep = 0.02;

// Sign changes of the determinant on the uniform grid 0, ds, 2 ds, ... <= s_max.
std::vector<Bracket> scan(const BeamSystem& system, double s_max, double ds = kDefaultScanStep,
                          double rel_tol = kDefaultRelTol);
std::vector<Bracket> scan(const BeamSystem& system, double s_min, double s_max, double ds,
                          double rel_tol);

inline constexpr double kDefaultLambdaTol = 1e-10;

// Refines a bracket to relative tolerance tol_lambda_rel in lambda.
double refine(const BeamSystem& system, const Bracket& bracket,
              double tol_lambda_rel = kDefaultLambdaTol, double rel_tol = kDefaultRelTol);

// s_max = (n + 2) * pi/2 * (max sigma/rho)^{1/4}.
double scan_limit(const BeamSystem& system, int count);

struct SolveOptions {
  double rel_tol = kDefaultRelTol;
  double ds = kDefaultScanStep;
  double tol_lambda_rel = kDefaultLambdaTol;
};

// First `count` eigenvalues, ascending. The scan range grows until enough
// brackets are found.
std::vector<double> find_eigenvalues(const BeamSystem& system, int count,
                                     const SolveOptions& opts = {});

inline constexpr int kDefaultModeStations = 257;
inline constexpr double kDegeneracyGap = 1e3;

struct Eigenpair {
  int index = 0;  // 1-based
  double lambda = 0.0;
  // Coefficients of (y1, y2, z1, z2) in units of each trajectory's final
  // scale; unit Euclidean norm, a >= 0 (b > 0 when a vanishes).
  std::array<double, 4> null_vector{};
  std::array<double, 4> log_offsets{};
  // H-normalized mode. Left samples run from -1 to 0, right from 0 to 1.
  std::vector<double> left_x;
  std::vector<QuasiState> left_states;
  std::vector<double> right_x;
  std::vector<QuasiState> right_states;
  double h_norm = 1.0;
  double mass_displacement = 0.0;  // u(0)
  // Balanced interface residuals R1..R4 relative to the mode scale at 0.
  std::array<double, 4> interface_residuals{};
  std::array<double, 4> singular_values{};  // balanced matrix, descending
  double sv_gap = 0.0;                       // second smallest / smallest
  bool degenerate = false;                   // sv_gap < 1e3
};

struct EigenpairOptions {
  double rel_tol = kDefaultRelTol;
  int stations_per_side = kDefaultModeStations;
};

Eigenpair eigenpair(const BeamSystem& system, double lambda_n, int index = 0,
                    const EigenpairOptions& opts = {});
std::vector<Eigenpair> eigenpairs(const BeamSystem& system, const std::vector<double>& lambdas,
                                  const EigenpairOptions& opts = {});

// Composite Simpson on uniform samples (odd count).
double simpson(const std::vector<double>& x, const std::vector<double>& f);

// <phi, psi>_H = int rho1 u u + int rho2 v v + M u(0) u(0).
double h_inner(const BeamSystem& system, const Eigenpair& phi, const Eigenpair& psi);
// int sigma u'' u'' + q u' u' over both sides.
double energy_form(const BeamSystem& system, const Eigenpair& phi, const Eigenpair& psi);

enum class StepClass { kStep1 = 1, kStep2 = 2, kStep3 = 3 };
std::string to_string(StepClass c);

inline constexpr double kStepZeroThreshold = 1e-6;

struct StepDiagnostics {
  StepClass step = StepClass::kStep1;
  SubwronskianTriple left;   // sigma_bar_1 etc. at x = 0
  SubwronskianTriple right;  // sigma_bar_2 etc. at x = 0
};

// Step1: both sigma_bar_i(0) nonzero; Step2: both zero; Step3: exactly one.
// Zero is judged on the balanced subwronskian measure.
StepDiagnostics step_classify(const BeamSystem& system, double lambda,
                              double rel_tol = kDefaultRelTol,
                              double zero_threshold = kStepZeroThreshold);

struct ModeVerification {
  int index = 0;
  double lambda = 0.0;
  double det_derivative = 0.0;  // |d/ds det| of the balanced matrix; scale 1
  double sv_gap = 0.0;
  double sigma_min_rel = 0.0;     // smallest / largest singular value
  double sigma_second_rel = 0.0;  // second smallest / largest
  double sign_product_left = 0.0;   // u'(-1) * T1 u(-1)
  double sign_product_right = 0.0;  // v'(1) * T2 v(1)
  StepClass step = StepClass::kStep1;
  double rayleigh_residual = 0.0;  // |lambda - energy(phi, phi)|
  double normalization_residual = 0.0;
  bool simple = false;
};

inline constexpr double kSimplicityDerivativeThreshold = 1e-6;

// |d/ds| of the balanced determinant at s = lambda^{1/4}, centered difference.
double det_derivative(const BeamSystem& system, double lambda, double rel_tol = kDefaultRelTol);

struct VerificationReport {
  std::vector<ModeVerification> modes;
  bool positivity = false;
  bool strict_ordering = false;
  bool simplicity = false;
  bool products_nonvanishing = false;
  bool left_sign_constant = false;
  bool right_sign_constant = false;
  int left_sign = 0;
  int right_sign = 0;
  std::vector<std::vector<double>> orthogonality;  // full H Gram matrix
  double orthogonality_max_offdiag = 0.0;
  double rayleigh_max_residual = 0.0;           // max |lambda - energy|
  double rayleigh_max_relative_residual = 0.0;  // max |lambda - energy| / lambda
  bool theorem1_consistent = false;
  // The two conflicting sign statements in circulation for these products.
  bool matches_positive_left_convention = false;  // left > 0, right < 0
  bool matches_negative_left_convention = false;  // left < 0, right > 0
  std::string sign_note;
};

VerificationReport verify(const BeamSystem& system, const std::vector<Eigenpair>& pairs,
                          double rel_tol = kDefaultRelTol);

}  // namespace beamspec
