#include "sol3/spectral.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "sol3/errors.hpp"

namespace sol3::spectral {

EigenResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& A, int k, double shift, double tol,
                              int max_iters, int extra, std::uint64_t seed) {
  const int n = static_cast<int>(A.rows());
  if (k < 1 || k > n) throw NumericalError(ErrorKind::InvalidArgument, "bad eigenpair count");
  const int b = std::min(n, k + extra);

  Eigen::SparseMatrix<double> S = A;
  for (int i = 0; i < n; ++i) S.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError(ErrorKind::NotConverged, "shifted operator factorization failed");
  if ((ldlt.vectorD().array() <= 0.0).any())
    throw NumericalError(ErrorKind::InvalidArgument, "shift is not below the spectrum");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd X(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);

  EigenResult out;
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::MatrixXd Y = ldlt.solve(X);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Y = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);
    const Eigen::MatrixXd AY = A * Y;
    const Eigen::MatrixXd T = Y.transpose() * AY;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
    X = Y * es.eigenvectors();
    const Eigen::MatrixXd R = AY * es.eigenvectors() - X * es.eigenvalues().asDiagonal();
    double worst = 0.0;
    for (int j = 0; j < k; ++j)
      worst = std::max(worst, R.col(j).norm() / std::max(1.0, std::abs(es.eigenvalues()[j])));
    out.values = es.eigenvalues().head(k);
    out.vectors = X.leftCols(k);
    out.iterations = it;
    if (worst <= tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace sol3::spectral
