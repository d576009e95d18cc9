#include "beamspec/fem_oracle.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "beamspec/errors.hpp"

namespace beamspec {

namespace {

// 5-point Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::array<double, 5> xi;
  std::array<double, 5> w;
};

GaussRule gauss5() {
  const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  const std::array<double, 5> p{-b, -a, 0.0, a, b};
  const std::array<double, 5> w{wb, wa, 128.0 / 225.0, wa, wb};
  GaussRule r{};
  for (int i = 0; i < 5; ++i) {
    r.xi[i] = 0.5 * (p[i] + 1.0);
    r.w[i] = 0.5 * w[i];
  }
  return r;
}

using Local = Eigen::Matrix4d;

ElementSamples element_samples(const CoefficientProfile& p, double x0, double h) {
  static const GaussRule rule = gauss5();
  ElementSamples es;
  for (int g = 0; g < 5; ++g) {
    const double t = rule.xi[g];
    const double x = x0 + h * t;
    const double t2 = t * t;
    const double t3 = t2 * t;
    es.value[g] = {1 - 3 * t2 + 2 * t3, h * (t - 2 * t2 + t3), 3 * t2 - 2 * t3, h * (-t2 + t3)};
    es.slope[g] = Eigen::Vector4d{-6 * t + 6 * t2, h * (1 - 4 * t + 3 * t2), 6 * t - 6 * t2,
                                  h * (-2 * t + 3 * t2)} / h;
    es.curvature[g] =
        Eigen::Vector4d{-6 + 12 * t, h * (-4 + 6 * t), 6 - 12 * t, h * (-2 + 6 * t)} / (h * h);
    const double jw = h * rule.w[g];
    es.w_sigma[g] = jw * p.sigma_at(x);
    es.w_q[g] = jw * p.q_at(x);
    es.w_rho[g] = jw * p.rho_at(x);
  }
  return es;
}

void element_matrices(const ElementSamples& es, Local& ke, Local& me) {
  ke.setZero();
  me.setZero();
  for (int g = 0; g < 5; ++g) {
    ke += es.w_sigma[g] * es.curvature[g] * es.curvature[g].transpose() +
          es.w_q[g] * es.slope[g] * es.slope[g].transpose();
    me += es.w_rho[g] * es.value[g] * es.value[g].transpose();
  }
}

Eigen::Vector4d local(const ElementSamples& es, const Eigen::VectorXd& a) {
  Eigen::Vector4d v;
  for (int k = 0; k < 4; ++k) v[k] = es.dofs[k] < 0 ? 0.0 : a[es.dofs[k]];
  return v;
}

}  // namespace

DiscreteOperator assemble(const BeamSystem& system, int elements_per_side) {
  if (elements_per_side < kMinElementsPerSide)
    throw PreconditionError(fmt::format("need at least {} elements per side", kMinElementsPerSide));
  const int e = elements_per_side;
  const int node_count = 2 * e + 1;
  const int full = 2 * node_count;

  DiscreteOperator op;
  op.elements_per_side = e;
  op.nodes.resize(node_count);
  for (int i = 0; i < node_count; ++i)
    op.nodes[i] = i == e ? 0.0 : (i < e ? -1.0 + double(i) / e : double(i - e) / e);

  // Hinged ends: drop u(-1) (DOF 0) and u(1) (DOF full - 2).
  std::vector<int> reduced(full, -1);
  for (int k = 0; k < full; ++k) {
    if (k == 0 || k == full - 2) continue;
    reduced[k] = static_cast<int>(op.free_dof.size());
    op.free_dof.push_back(k);
  }
  const int n = static_cast<int>(op.free_dof.size());
  op.stiffness = Eigen::MatrixXd::Zero(n, n);
  op.mass = Eigen::MatrixXd::Zero(n, n);

  Local ke, me;
  for (int el = 0; el < 2 * e; ++el) {
    const CoefficientProfile& p = el < e ? system.left : system.right;
    const double x0 = op.nodes[el];
    const double h = op.nodes[el + 1] - x0;
    ElementSamples es = element_samples(p, x0, h);
    for (int k = 0; k < 4; ++k) es.dofs[k] = reduced[2 * el + k];
    element_matrices(es, ke, me);
    for (int a = 0; a < 4; ++a) {
      const int ra = es.dofs[a];
      if (ra < 0) continue;
      for (int b = 0; b < 4; ++b) {
        const int rb = es.dofs[b];
        if (rb < 0) continue;
        op.stiffness(ra, rb) += ke(a, b);
        op.mass(ra, rb) += me(a, b);
      }
    }
    op.samples.push_back(es);
  }
  op.mass_dof = reduced[2 * e];
  op.mass(op.mass_dof, op.mass_dof) += system.mass;
  op.point_mass = system.mass;
  // Symmetrize away round-off from the element sums.
  op.stiffness = 0.5 * (op.stiffness + op.stiffness.transpose()).eval();
  op.mass = 0.5 * (op.mass + op.mass.transpose()).eval();
  return op;
}

double energy(const DiscreteOperator& op, const Eigen::VectorXd& a) {
  double sum = 0.0;
  for (const ElementSamples& es : op.samples) {
    const Eigen::Vector4d v = local(es, a);
    for (int g = 0; g < 5; ++g) {
      const double c = es.curvature[g].dot(v);
      const double d = es.slope[g].dot(v);
      sum += es.w_sigma[g] * c * c + es.w_q[g] * d * d;
    }
  }
  return sum;
}

double inertia(const DiscreteOperator& op, const Eigen::VectorXd& a) {
  double sum = op.point_mass * a[op.mass_dof] * a[op.mass_dof];
  for (const ElementSamples& es : op.samples) {
    const Eigen::Vector4d v = local(es, a);
    for (int g = 0; g < 5; ++g) {
      const double u = es.value[g].dot(v);
      sum += es.w_rho[g] * u * u;
    }
  }
  return sum;
}

namespace {

void refine_by_rayleigh(const DiscreteOperator& op, OracleSpectrum& out) {
  if (op.samples.empty()) return;
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    const Eigen::VectorXd v = out.eigenvectors.col(static_cast<Eigen::Index>(i));
    out.eigenvalues[i] = energy(op, v) / inertia(op, v);
  }
}

}  // namespace

OracleSpectrum solve_generalized(const DiscreteOperator& op, int count) {
  if (count < 1 || count > op.size())
    throw PreconditionError(fmt::format("count {} outside [1, {}]", count, op.size()));
  Eigen::LLT<Eigen::MatrixXd> chol(op.mass);
  if (chol.info() != Eigen::Success) throw DefinitenessError("mass matrix is not positive definite");
  OracleSpectrum out;
  out.elements_per_side = op.elements_per_side;
  // Factor the stiffness and take the largest reciprocals: roundoff then stays
  // relative to the low eigenvalues instead of to the top of the discrete spectrum.
  Eigen::LLT<Eigen::MatrixXd> kchol(op.stiffness);
  if (kchol.info() == Eigen::Success) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        op.mass, op.stiffness, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) throw DefinitenessError("generalized eigensolve failed");
    const int n = op.size();
    out.eigenvalues.resize(count);
    out.eigenvectors.resize(n, count);
    for (int i = 0; i < count; ++i) {
      const int j = n - 1 - i;
      out.eigenvalues[i] = 1.0 / solver.eigenvalues()(j);
      Eigen::VectorXd v = solver.eigenvectors().col(j);
      v /= std::sqrt(v.dot(op.mass * v));
      out.eigenvectors.col(i) = v;
    }
    refine_by_rayleigh(op, out);
    return out;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      op.stiffness, op.mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw DefinitenessError("generalized eigensolve failed");
  out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + count);
  out.eigenvectors = solver.eigenvectors().leftCols(count);
  refine_by_rayleigh(op, out);
  return out;
}

std::vector<ComparisonRow> compare(const std::vector<double>& shooting,
                                   const OracleSpectrum& coarse, const OracleSpectrum& fine) {
  if (coarse.eigenvalues.size() < shooting.size() || fine.eigenvalues.size() < shooting.size())
    throw PreconditionError("oracle spectra shorter than the shooting list");
  const double ratio = fine.elements_per_side > 0 && coarse.elements_per_side > 0
                           ? double(fine.elements_per_side) / coarse.elements_per_side
                           : 2.0;
  const double gain = std::pow(ratio, kHermiteEigenOrder);
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < shooting.size(); ++i) {
    ComparisonRow r;
    r.index = static_cast<int>(i) + 1;
    r.shooting = shooting[i];
    r.coarse = coarse.eigenvalues[i];
    r.fine = fine.eigenvalues[i];
    r.richardson = ratio == 1.0 ? r.fine : (gain * r.fine - r.coarse) / (gain - 1.0);
    const double ref = std::abs(r.shooting);
    r.rel_error_coarse = std::abs(r.coarse - r.shooting) / ref;
    r.rel_error_fine = std::abs(r.fine - r.shooting) / ref;
    r.rel_error_richardson = std::abs(r.richardson - r.shooting) / ref;
    r.order = r.rel_error_coarse > 0.0 && r.rel_error_fine > 0.0 && ratio != 1.0
                  ? std::log(r.rel_error_coarse / r.rel_error_fine) / std::log(ratio)
                  : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace beamspec
