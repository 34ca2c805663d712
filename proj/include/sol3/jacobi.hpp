#pragma once

// Jacobi operator L = Delta + |B|^2 + Ric(N) on a closed triangle mesh,
// discretized with cotangent weights from intrinsic edge lengths and a lumped
// mass matrix.

#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>

#include "sol3/sphere.hpp"
#include "sol3/surface_fit.hpp"

namespace sol3::sphere {

struct JacobiOperator {
  Eigen::SparseMatrix<double> stiffness;  // positive semidefinite cotan matrix
  Eigen::VectorXd mass;                   // lumped vertex areas
  Eigen::VectorXd potential;              // |B|^2 - 2 N3^2
  double h = 0.0;                         // mean edge length
  double curvature_scale = 1.0;           // max(|H|, 1)
};

JacobiOperator jacobi_operator(const CmcSphereMesh& m, const std::vector<fit::VertexFit>& fits);

/// Pointwise L f.
Eigen::VectorXd apply_jacobi(const JacobiOperator& op, const Eigen::VectorXd& f);

/// L2 norm with the lumped mass.
double mass_norm(const JacobiOperator& op, const Eigen::VectorXd& f);

struct JacobiSpectrum {
  Eigen::VectorXd eigenvalues;   // lowest of -L, ascending
  Eigen::MatrixXd eigenfunctions;  // vertex values, unit mass norm
  int index = 0;                 // eigenvalues below -zero_tol
  int zero_cluster = 0;          // eigenvalues with |lambda| <= zero_tol
  double zero_tol = 0.0;         // C * h * s^3, s = curvature_scale
  bool converged = false;
};

/// Eigenvalues scale like s^2 and the relative mesh size is h s, so the
/// zero cluster is |lambda| <= C h s^3 with s = max(|H|, 1).
constexpr double kDefaultZeroClusterC = 1.0;

/// Throws NotConverged if the eigensolver fails.
JacobiSpectrum jacobi_spectrum(const JacobiOperator& op, int k = 6,
                               double zero_cluster_C = kDefaultZeroClusterC);
JacobiSpectrum jacobi_spectrum(const CmcSphereMesh& m, int k = 6,
                               double zero_cluster_C = kDefaultZeroClusterC);

}  // namespace sol3::sphere
