#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "beamspec/beam_config.hpp"

namespace beamspec {

// Shape-function rows of one element at its Gauss points, with the
// quadrature weight folded into each coefficient.
struct ElementSamples {
  std::array<int, 4> dofs{};  // reduced indices, -1 where constrained
  std::array<Eigen::Vector4d, 5> curvature;
  std::array<Eigen::Vector4d, 5> slope;
  std::array<Eigen::Vector4d, 5> value;
  std::array<double, 5> w_sigma{};
  std::array<double, 5> w_q{};
  std::array<double, 5> w_rho{};
};

// Conforming cubic Hermite discretization with two DOFs (u, u') per node.
// Nodes are uniform per side and shared at x = 0; the displacement DOFs at
// x = -1 and x = 1 are removed.
struct DiscreteOperator {
  int elements_per_side = 0;
  std::vector<double> nodes;       // x of every node, -1 .. 1
  std::vector<int> free_dof;       // reduced index -> unconstrained DOF (2 node + k)
  int mass_dof = -1;               // reduced index of u(0)
  Eigen::MatrixXd stiffness;       // int sigma phi'' phi'' + q phi' phi'
  Eigen::MatrixXd mass;            // int rho phi phi, plus M at u(0)
  std::vector<ElementSamples> samples;  // empty for hand-built operators
  double point_mass = 0.0;

  int size() const { return static_cast<int>(stiffness.rows()); }
};

inline constexpr int kMinElementsPerSide = 4;

DiscreteOperator assemble(const BeamSystem& system, int elements_per_side);

// a^T K a and a^T B a summed pointwise from the element samples. On fine
// meshes the assembled K carries entries of order h^-3 that cancel in a^T K a;
// evaluating the curvature at each Gauss point first avoids most of that.
double energy(const DiscreteOperator& op, const Eigen::VectorXd& a);
double inertia(const DiscreteOperator& op, const Eigen::VectorXd& a);

struct OracleSpectrum {
  int elements_per_side = 0;
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // B-orthonormal columns
};

// Lowest `count` eigenvalues of K a = lambda B a. B must be positive definite.
// The pencil is reduced through the Cholesky factor of K when K is definite
// (solving B a = mu K a, lambda = 1/mu), otherwise through that of B. When
// the operator carries element samples, each eigenvalue is then evaluated as
// the Rayleigh quotient energy / inertia of its eigenvector.
OracleSpectrum solve_generalized(const DiscreteOperator& op, int count);

struct ComparisonRow {
  int index = 0;
  double shooting = 0.0;
  double coarse = 0.0;
  double fine = 0.0;
  double richardson = 0.0;
  double rel_error_coarse = 0.0;
  double rel_error_fine = 0.0;
  double rel_error_richardson = 0.0;
  double order = 0.0;  // log(err_coarse / err_fine) / log(refinement ratio)
};

inline constexpr double kHermiteEigenOrder = 4.0;

std::vector<ComparisonRow> compare(const std::vector<double>& shooting,
                                   const OracleSpectrum& coarse, const OracleSpectrum& fine);

}  // namespace beamspec
