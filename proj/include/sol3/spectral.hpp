#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/Sparse>

namespace sol3::spectral {

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
  int iterations = 0;
  bool converged = false;
};

/// Lowest k eigenpairs of a symmetric sparse matrix by block inverse
/// iteration on A - shift I with Rayleigh-Ritz. The shift must lie strictly
/// below the spectrum so that A - shift I is positive definite.
EigenResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& A, int k, double shift,
                              double tol = 1e-9, int max_iters = 2000, int extra = 6,
                              std::uint64_t seed = 7);

}  // namespace sol3::spectral
