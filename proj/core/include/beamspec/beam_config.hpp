#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace beamspec {

enum class Side { kLeft, kRight };
enum class Coefficient { kRho, kSigma, kQ };

inline constexpr int kMaxPolynomialDegree = 8;
inline constexpr int kValidationGridPoints = 1001;
inline constexpr double kMinPositive = 1e-8;
inline constexpr double kAxialForceSlack = 1e-12;

std::string_view to_string(Side side);
std::string_view to_string(Coefficient which);

// Closed interval of a side: [-1, 0] on the left, [0, 1] on the right.
struct Interval {
  double lo;
  double hi;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

Interval interval_of(Side side);

// Ascending-power polynomial coefficients.
using Polynomial = std::vector<double>;

double horner(const Polynomial& p, double x);

// Density, flexural rigidity and axial force of one beam.
class CoefficientProfile {
 public:
  CoefficientProfile(Side side, Polynomial rho, Polynomial sigma, Polynomial q);

  // Uniform beam: rho = sigma = 1, q = 0.
  static CoefficientProfile uniform(Side side);

  Side side() const { return side_; }
  Interval interval() const { return interval_of(side_); }

  const Polynomial& rho() const { return rho_; }
  const Polynomial& sigma() const { return sigma_; }
  const Polynomial& q() const { return q_; }
  const Polynomial& polynomial(Coefficient which) const;

  // Unchecked evaluations used in inner loops. q is clamped at zero.
  double rho_at(double x) const { return horner(rho_, x); }
  double sigma_at(double x) const { return horner(sigma_, x); }
  double q_at(double x) const;

  // Throws ConstraintError naming the coefficient and the grid point.
  void validate() const;

  bool is_q_zero() const;

 private:
  Side side_;
  Polynomial rho_;
  Polynomial sigma_;
  Polynomial q_;
};

// Horner evaluation with a domain check.
double eval_coeff(const CoefficientProfile& profile, Coefficient which, double x);

// Two beams joined at x = 0 by a point mass.
struct BeamSystem {
  CoefficientProfile left;
  CoefficientProfile right;
  double mass = 0.0;

  const CoefficientProfile& profile(Side side) const {
    return side == Side::kLeft ? left : right;
  }

  static BeamSystem uniform(double mass);

  void validate() const;
};

// Reads the JSON configuration document and validates the result.
BeamSystem parse_system(std::string_view document);
BeamSystem load_system(const std::string& path);

// Inverse of parse_system; polynomial arrays are written verbatim.
std::string serialize_system(const BeamSystem& system);

}  // namespace beamspec
