#include "beamspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "beamspec/errors.hpp"
#include "beamspec/roots.hpp"

namespace beamspec {

namespace {

double fourth_root(double lambda) { return std::sqrt(std::sqrt(lambda)); }

// Row weights that put displacement, slope, moment and shear on one footing.
std::array<double, 4> row_weights(double lambda) {
  const double s = std::max(1.0, fourth_root(lambda));
  return {1.0, 1.0 / s, 1.0 / (s * s), 1.0 / (s * s * s)};
}

IntegrateOptions endpoint_only(double rel_tol) { return IntegrateOptions{rel_tol, 2}; }

}  // namespace

Eigen::Matrix4d InterfaceMatrix::true_values() const {
  Eigen::Matrix4d m = values;
  for (int j = 0; j < 4; ++j) m.col(j) *= std::exp(log_offsets[j]);
  return m;
}

Eigen::Matrix4d InterfaceMatrix::balanced(Eigen::Matrix4d* to_values) const {
  const auto w = row_weights(lambda);
  Eigen::Matrix4d b = values;
  for (int i = 0; i < 4; ++i) b.row(i) *= w[i];
  Eigen::Matrix4d out;
  Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
  for (int block = 0; block < 2; ++block) {
    const Eigen::Matrix<double, 4, 2> pair = b.middleCols<2>(2 * block);
    Eigen::HouseholderQR<Eigen::Matrix<double, 4, 2>> qr(pair);
    Eigen::Matrix2d r = qr.matrixQR().topLeftCorner<2, 2>().triangularView<Eigen::Upper>();
    Eigen::Matrix<double, 4, 2> q = qr.householderQ() * Eigen::Matrix<double, 4, 2>::Identity();
    // Positive diagonal keeps det(r) > 0, so the determinant sign survives.
    for (int k = 0; k < 2; ++k) {
      if (r(k, k) < 0.0) {
        r.row(k) *= -1.0;
        q.col(k) *= -1.0;
      }
    }
    out.middleCols<2>(2 * block) = q;
    t.block<2, 2>(2 * block, 2 * block) = r.inverse();
  }
  if (to_values) *to_values = t;
  return out;
}

InterfaceMatrix interface_matrix(const BeamSystem& system, const FundamentalSet& left,
                                 const FundamentalSet& right) {
  if (left.side != Side::kLeft || right.side != Side::kRight)
    throw PreconditionError("interface_matrix needs a left and a right fundamental set");
  if (left.lambda != right.lambda)
    throw PreconditionError("fundamental sets evaluated at different lambda");
  const double lambda = left.lambda;
  const double mass_term = system.mass * lambda;

  InterfaceMatrix im;
  im.lambda = lambda;
  const std::array<const Trajectory*, 4> columns{&left.first, &left.second, &right.first,
                                                 &right.second};
  for (int j = 0; j < 4; ++j) {
    const QuasiState& w = columns[j]->final_state();
    Eigen::Vector4d c;
    if (j < 2) {
      c << w[kDisp], w[kSlope], w[kMoment], w[kShear] + mass_term * w[kDisp];
    } else {
      c << -w[kDisp], -w[kSlope], -w[kMoment], -w[kShear];
    }
    const double n = c.cwiseAbs().maxCoeff();
    im.log_offsets[j] = columns[j]->log_scale();
    if (n > 0.0) {
      c /= n;
      im.log_offsets[j] += std::log(n);
    }
    im.values.col(j) = c;
  }
  return im;
}

InterfaceMatrix interface_matrix(const BeamSystem& system, double lambda, double rel_tol) {
  const auto opts = endpoint_only(rel_tol);
  return interface_matrix(system, left_fundamental(system, lambda, opts),
                          right_fundamental(system, lambda, opts));
}

double DeterminantSample::value() const {
  return sign == 0 ? 0.0 : sign * std::exp(log_abs);
}

double DeterminantSample::value_relative(double log_ref) const {
  return sign == 0 ? 0.0 : sign * std::exp(log_abs - log_ref);
}

namespace {

DeterminantSample determinant_of(const InterfaceMatrix& im, double s) {
  DeterminantSample d;
  d.s = s;
  d.lambda = im.lambda;
  const double det = im.values.partialPivLu().determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    d.sign = 0;
    d.log_abs = -std::numeric_limits<double>::infinity();
    return d;
  }
  d.sign = det > 0.0 ? 1 : -1;
  d.log_abs = std::log(std::abs(det));
  for (double l : im.log_offsets) d.log_abs += l;
  return d;
}

}  // namespace

DeterminantSample char_det_at_s(const BeamSystem& system, double s, double rel_tol) {
  if (!(s >= 0.0)) throw PreconditionError(fmt::format("s={:g} must be >= 0", s));
  const double lambda = s * s * s * s;
  return determinant_of(interface_matrix(system, lambda, rel_tol), s);
}

DeterminantSample char_det(const BeamSystem& system, double lambda, double rel_tol) {
  if (!(lambda >= 0.0)) throw PreconditionError(fmt::format("lambda={:g} must be >= 0", lambda));
  return determinant_of(interface_matrix(system, lambda, rel_tol), fourth_root(lambda));
}

double balanced_det_at_s(const BeamSystem& system, double s, double rel_tol) {
  const InterfaceMatrix im = interface_matrix(system, s * s * s * s, rel_tol);
  return im.balanced().partialPivLu().determinant();
}

std::vector<Bracket> scan(const BeamSystem& system, double s_min, double s_max, double ds,
                          double rel_tol) {
  if (!(ds > 0.0)) throw PreconditionError("scan step must be positive");
  if (!(s_max > 0.0)) throw PreconditionError("s_max must be positive");
  std::vector<Bracket> out;
  const auto k_first = static_cast<long>(std::ceil(std::max(0.0, s_min) / ds - 1e-9));
  const auto k_last = static_cast<long>(std::floor(s_max / ds + 1e-9));
  if (k_last <= k_first) return out;

  auto sample = [&](long k) {
    double s = double(k) * ds;
    DeterminantSample d = char_det_at_s(system, s, rel_tol);
    if (d.sign == 0) d = char_det_at_s(system, s + 1e-9 * ds, rel_tol);
    return d;
  };
  DeterminantSample prev = sample(k_first);
  for (long k = k_first + 1; k <= k_last; ++k) {
    DeterminantSample cur = sample(k);
    if (prev.sign * cur.sign < 0) out.push_back({prev, cur});
    prev = cur;
  }
  return out;
}

std::vector<Bracket> scan(const BeamSystem& system, double s_max, double ds, double rel_tol) {
  return scan(system, 0.0, s_max, ds, rel_tol);
}

double refine(const BeamSystem& system, const Bracket& bracket, double tol_lambda_rel,
              double rel_tol) {
  if (bracket.lo.sign * bracket.hi.sign >= 0)
    throw BracketError(fmt::format("determinant does not change sign on [{:g}, {:g}]",
                                   bracket.lo.s, bracket.hi.s));
  const double ref = std::max(bracket.lo.log_abs, bracket.hi.log_abs);
  auto f = [&](double s) { return char_det_at_s(system, s, rel_tol).value_relative(ref); };
  // lambda = s^4, so a relative step in s is a quarter of the one in lambda.
  const double s = find_root(f, bracket.lo.s, bracket.hi.s, bracket.lo.value_relative(ref),
                             bracket.hi.value_relative(ref), 0.25 * tol_lambda_rel);
  return s * s * s * s;
}

double scan_limit(const BeamSystem& system, int count) {
  double ratio = 0.0;
  for (const CoefficientProfile* p : {&system.left, &system.right}) {
    const Interval iv = p->interval();
    for (int i = 0; i < kValidationGridPoints; ++i) {
      const double x = iv.lo + iv.length() * i / (kValidationGridPoints - 1);
      ratio = std::max(ratio, p->sigma_at(x) / p->rho_at(x));
    }
  }
  return (count + 2) * std::numbers::pi / 2.0 * std::sqrt(std::sqrt(ratio));
}

std::vector<double> find_eigenvalues(const BeamSystem& system, int count,
                                     const SolveOptions& opts) {
  if (count < 1) throw PreconditionError("mode count must be >= 1");
  double s_max = scan_limit(system, count);
  std::vector<Bracket> brackets = scan(system, 0.0, s_max, opts.ds, opts.rel_tol);
  for (int grow = 0; static_cast<int>(brackets.size()) < count; ++grow) {
    if (grow > 20) throw Error("eigenvalue scan failed to find enough roots");
    const double s_from = std::floor(s_max / opts.ds + 1e-9) * opts.ds;
    s_max *= 1.5;
    auto more = scan(system, s_from, s_max, opts.ds, opts.rel_tol);
    brackets.insert(brackets.end(), more.begin(), more.end());
  }
  std::vector<double> lambdas;
  for (int n = 0; n < count; ++n)
    lambdas.push_back(refine(system, brackets[n], opts.tol_lambda_rel, opts.rel_tol));
  return lambdas;
}

double simpson(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = x.size();
  if (n != f.size() || n < 3 || n % 2 == 0)
    throw PreconditionError("Simpson rule needs an odd number (>= 3) of samples");
  const double h = (x.back() - x.front()) / double(n - 1);
  double acc = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return acc * h / 3.0;
}

Eigenpair eigenpair(const BeamSystem& system, double lambda_n, int index,
                    const EigenpairOptions& opts) {
  if (!(lambda_n > 0.0)) throw PreconditionError("eigenvalue must be positive");
  if (opts.stations_per_side < 3 || opts.stations_per_side % 2 == 0)
    throw PreconditionError("stations_per_side must be odd and >= 3");

  const IntegrateOptions iopts{opts.rel_tol, opts.stations_per_side};
  const FundamentalSet left = left_fundamental(system, lambda_n, iopts);
  const FundamentalSet right = right_fundamental(system, lambda_n, iopts);
  const InterfaceMatrix im = interface_matrix(system, left, right);

  Eigen::Matrix4d to_values;
  const Eigen::Matrix4d b = im.balanced(&to_values);
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(b, Eigen::ComputeFullV);
  const Eigen::Vector4d sv = svd.singularValues();
  const Eigen::Vector4d nu = to_values * svd.matrixV().col(3);

  Eigenpair ep;
  ep.index = index;
  ep.lambda = lambda_n;
  ep.log_offsets = im.log_offsets;
  for (int i = 0; i < 4; ++i) ep.singular_values[i] = sv[i];
  ep.sv_gap = sv[3] > 0.0 ? sv[2] / sv[3] : std::numeric_limits<double>::infinity();
  ep.degenerate = ep.sv_gap < kDegeneracyGap;

  // Coefficients of each trajectory in its own final-scale units.
  const std::array<const Trajectory*, 4> traj{&left.first, &left.second, &right.first,
                                              &right.second};
  std::array<double, 4> coef{};
  for (int j = 0; j < 4; ++j)
    coef[j] = nu[j] * std::exp(traj[j]->log_scale() - im.log_offsets[j]);
  double norm = 0.0;
  for (double c : coef) norm += c * c;
  norm = std::sqrt(norm);
  const bool a_vanishes = std::abs(coef[0]) <= 1e-12 * norm;
  if (coef[0] < 0.0 || (a_vanishes && coef[1] < 0.0))
    for (double& c : coef) c = -c;
  for (int j = 0; j < 4; ++j) ep.null_vector[j] = coef[j] / norm;

  const std::size_t n = left.first.size();
  ep.left_x = left.first.x;
  ep.left_states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const QuasiState p = left.first.relative_state(i);
    const QuasiState q = left.second.relative_state(i);
    for (int k = 0; k < 4; ++k) ep.left_states[i][k] = coef[0] * p[k] + coef[1] * q[k];
  }
  ep.right_x.resize(n);
  ep.right_states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = n - 1 - i;  // right trajectories run from 1 to 0
    const QuasiState p = right.first.relative_state(r);
    const QuasiState q = right.second.relative_state(r);
    ep.right_x[i] = right.first.x[r];
    for (int k = 0; k < 4; ++k) ep.right_states[i][k] = coef[2] * p[k] + coef[3] * q[k];
  }

  std::vector<double> fl(n), fr(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = ep.left_states[i][kDisp];
    const double v = ep.right_states[i][kDisp];
    fl[i] = system.left.rho_at(ep.left_x[i]) * u * u;
    fr[i] = system.right.rho_at(ep.right_x[i]) * v * v;
  }
  const double u0 = ep.left_states.back()[kDisp];
  const double h2 = simpson(ep.left_x, fl) + simpson(ep.right_x, fr) + system.mass * u0 * u0;
  const double inv = 1.0 / std::sqrt(h2);
  for (auto* states : {&ep.left_states, &ep.right_states})
    for (QuasiState& s : *states)
      for (double& v : s) v *= inv;
  ep.h_norm = 1.0;
  ep.mass_displacement = ep.left_states.back()[kDisp];

  const QuasiState& ul = ep.left_states.back();
  const QuasiState& vr = ep.right_states.front();
  const auto w = row_weights(lambda_n);
  const double mass_term = system.mass * lambda_n;
  std::array<double, 4> r{ul[kDisp] - vr[kDisp], ul[kSlope] - vr[kSlope],
                          ul[kMoment] - vr[kMoment],
                          ul[kShear] - vr[kShear] + mass_term * ul[kDisp]};
  double scale = std::abs(mass_term * ul[kDisp]) * w[3];
  for (int k = 0; k < 4; ++k)
    scale = std::max(scale, std::max(std::abs(ul[k]), std::abs(vr[k])) * w[k]);
  for (int k = 0; k < 4; ++k) ep.interface_residuals[k] = std::abs(r[k]) * w[k] / scale;
  return ep;
}

std::vector<Eigenpair> eigenpairs(const BeamSystem& system, const std::vector<double>& lambdas,
                                  const EigenpairOptions& opts) {
  std::vector<Eigenpair> out;
  out.reserve(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    out.push_back(eigenpair(system, lambdas[i], static_cast<int>(i) + 1, opts));
  return out;
}

namespace {

void require_same_grid(const Eigenpair& a, const Eigenpair& b) {
  if (a.left_x != b.left_x || a.right_x != b.right_x)
    throw PreconditionError("modes sampled on different stations");
}

}  // namespace

double h_inner(const BeamSystem& system, const Eigenpair& phi, const Eigenpair& psi) {
  require_same_grid(phi, psi);
  const std::size_t n = phi.left_x.size();
  std::vector<double> fl(n), fr(n);
  for (std::size_t i = 0; i < n; ++i) {
    fl[i] = system.left.rho_at(phi.left_x[i]) * phi.left_states[i][kDisp] *
            psi.left_states[i][kDisp];
    fr[i] = system.right.rho_at(phi.right_x[i]) * phi.right_states[i][kDisp] *
            psi.right_states[i][kDisp];
  }
  return simpson(phi.left_x, fl) + simpson(phi.right_x, fr) +
         system.mass * phi.mass_displacement * psi.mass_displacement;
}

double energy_form(const BeamSystem& system, const Eigenpair& phi, const Eigenpair& psi) {
  require_same_grid(phi, psi);
  const std::size_t n = phi.left_x.size();
  std::vector<double> fl(n), fr(n);
  auto integrand = [](const CoefficientProfile& p, double x, const QuasiState& a,
                      const QuasiState& b) {
    return a[kMoment] * b[kMoment] / p.sigma_at(x) + p.q_at(x) * a[kSlope] * b[kSlope];
  };
  for (std::size_t i = 0; i < n; ++i) {
    fl[i] = integrand(system.left, phi.left_x[i], phi.left_states[i], psi.left_states[i]);
    fr[i] = integrand(system.right, phi.right_x[i], phi.right_states[i], psi.right_states[i]);
  }
  return simpson(phi.left_x, fl) + simpson(phi.right_x, fr);
}

std::string to_string(StepClass c) {
  switch (c) {
    case StepClass::kStep1:
      return "Step1";
    case StepClass::kStep2:
      return "Step2";
    case StepClass::kStep3:
      return "Step3";
  }
  return "?";
}

StepDiagnostics step_classify(const BeamSystem& system, double lambda, double rel_tol,
                              double zero_threshold) {
  const auto opts = endpoint_only(rel_tol);
  StepDiagnostics d;
  d.left = subwronskians(left_fundamental(system, lambda, opts), 0.0, rel_tol);
  d.right = subwronskians(right_fundamental(system, lambda, opts), 0.0, rel_tol);
  const bool left_zero = std::abs(balanced_subwronskians(d.left)[0]) <= zero_threshold;
  const bool right_zero = std::abs(balanced_subwronskians(d.right)[0]) <= zero_threshold;
  if (!left_zero && !right_zero)
    d.step = StepClass::kStep1;
  else if (left_zero && right_zero)
    d.step = StepClass::kStep2;
  else
    d.step = StepClass::kStep3;
  return d;
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

const char* sign_word(int s) { return s > 0 ? "positive" : (s < 0 ? "negative" : "mixed"); }

}  // namespace

double det_derivative(const BeamSystem& system, double lambda, double rel_tol) {
  const double s = fourth_root(lambda);
  const double h = 1e-3 * s;
  return std::abs(balanced_det_at_s(system, s + h, rel_tol) -
                  balanced_det_at_s(system, s - h, rel_tol)) /
         (2.0 * h);
}

VerificationReport verify(const BeamSystem& system, const std::vector<Eigenpair>& pairs,
                          double rel_tol) {
  if (pairs.size() < 2) throw PreconditionError("verification needs at least two eigenpairs");
  VerificationReport rep;
  const std::size_t n = pairs.size();

  rep.positivity = true;
  rep.strict_ordering = true;
  rep.simplicity = true;
  rep.products_nonvanishing = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigenpair& ep = pairs[i];
    ModeVerification m;
    m.index = ep.index;
    m.lambda = ep.lambda;
    m.det_derivative = det_derivative(system, ep.lambda, rel_tol);
    m.sv_gap = ep.sv_gap;
    m.sigma_min_rel = ep.singular_values[3] / ep.singular_values[0];
    m.sigma_second_rel = ep.singular_values[2] / ep.singular_values[0];
    m.sign_product_left = ep.left_states.front()[kSlope] * ep.left_states.front()[kShear];
    m.sign_product_right = ep.right_states.back()[kSlope] * ep.right_states.back()[kShear];
    m.step = step_classify(system, ep.lambda, rel_tol).step;
    m.rayleigh_residual = std::abs(ep.lambda - energy_form(system, ep, ep));
    m.normalization_residual = std::abs(h_inner(system, ep, ep) - 1.0);
    m.simple = m.sv_gap >= kDegeneracyGap && m.det_derivative > kSimplicityDerivativeThreshold;

    rep.positivity = rep.positivity && ep.lambda > 0.0;
    if (i > 0) rep.strict_ordering = rep.strict_ordering && ep.lambda > pairs[i - 1].lambda;
    rep.simplicity = rep.simplicity && m.simple;
    const double floor = 1e-8 * ep.lambda;
    rep.products_nonvanishing = rep.products_nonvanishing &&
                                std::abs(m.sign_product_left) > floor &&
                                std::abs(m.sign_product_right) > floor;
    rep.rayleigh_max_residual = std::max(rep.rayleigh_max_residual, m.rayleigh_residual);
    rep.rayleigh_max_relative_residual =
        std::max(rep.rayleigh_max_relative_residual, m.rayleigh_residual / ep.lambda);
    rep.modes.push_back(m);
  }

  rep.left_sign = sign_of(rep.modes.front().sign_product_left);
  rep.right_sign = sign_of(rep.modes.front().sign_product_right);
  rep.left_sign_constant = rep.left_sign != 0;
  rep.right_sign_constant = rep.right_sign != 0;
  for (const auto& m : rep.modes) {
    if (sign_of(m.sign_product_left) != rep.left_sign) rep.left_sign_constant = false;
    if (sign_of(m.sign_product_right) != rep.right_sign) rep.right_sign_constant = false;
  }
  if (!rep.left_sign_constant) rep.left_sign = 0;
  if (!rep.right_sign_constant) rep.right_sign = 0;

  rep.orthogonality.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = h_inner(system, pairs[i], pairs[j]);
      rep.orthogonality[i][j] = rep.orthogonality[j][i] = g;
      if (i != j) rep.orthogonality_max_offdiag = std::max(rep.orthogonality_max_offdiag, std::abs(g));
    }
  }

  rep.theorem1_consistent = rep.positivity && rep.strict_ordering && rep.simplicity &&
                            rep.products_nonvanishing && rep.left_sign_constant &&
                            rep.right_sign_constant;
  rep.matches_positive_left_convention = rep.left_sign > 0 && rep.right_sign < 0;
  rep.matches_negative_left_convention = rep.left_sign < 0 && rep.right_sign > 0;
  rep.sign_note = fmt::format(
      "sign discrepancy: observed u'*T1u(-1) {} and v'*T2v(1) {} for every mode; "
      "convention (-1)>0,(1)<0 {}; convention (-1)<0,(1)>0 {}",
      sign_word(rep.left_sign), sign_word(rep.right_sign),
      rep.matches_positive_left_convention ? "matches" : "disagrees",
      rep.matches_negative_left_convention ? "matches" : "disagrees");
  return rep;
}

}  // namespace beamspec
