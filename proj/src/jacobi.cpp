#include "sol3/jacobi.hpp"

#include <algorithm>
#include <cmath>

#include "sol3/errors.hpp"
#include "sol3/spectral.hpp"

namespace sol3::sphere {

JacobiOperator jacobi_operator(const CmcSphereMesh& m, const std::vector<fit::VertexFit>& fits) {
  const auto& mesh = m.mesh;
  const int n = mesh.num_vertices();
  if (static_cast<int>(fits.size()) != n)
    throw NumericalError(ErrorKind::InvalidArgument, "one fit per vertex required");

  JacobiOperator op;
  op.mass = Eigen::VectorXd::Zero(n);
  op.potential.resize(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.faces.size() * 9);
  double edge_sum = 0.0;
  for (const auto& f : mesh.faces) {
    double len[3];  // len[k] is opposite vertex k
    for (int k = 0; k < 3; ++k)
      len[k] = mesh::edge_length(mesh.vertices[f[(k + 1) % 3]], mesh.vertices[f[(k + 2) % 3]]);
    const double s = 0.5 * (len[0] + len[1] + len[2]);
    const double area2 = s * (s - len[0]) * (s - len[1]) * (s - len[2]);
    if (!(area2 > 0.0)) throw NumericalError(ErrorKind::DegenerateMesh, "degenerate face in Jacobi operator");
    const double area = std::sqrt(area2);
    for (int k = 0; k < 3; ++k) {
      const double a = len[k], b = len[(k + 1) % 3], c = len[(k + 2) % 3];
      const double w = 0.5 * (b * b + c * c - a * a) / (4.0 * area);
      const int i = f[(k + 1) % 3], j = f[(k + 2) % 3];
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
      op.mass[f[k]] += area / 3.0;
      edge_sum += a;
    }
  }
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(trip.begin(), trip.end());
  op.h = edge_sum / (3.0 * mesh.num_faces());  // interior edges are counted twice, uniformly
  op.curvature_scale = std::max(std::abs(m.target_H), 1.0);
  for (int v = 0; v < n; ++v)
    op.potential[v] = fits[v].norm_b2 + ricci_of_unit(fits[v].normal);
  return op;
}

Eigen::VectorXd apply_jacobi(const JacobiOperator& op, const Eigen::VectorXd& f) {
  Eigen::VectorXd Kf = op.stiffness * f;
  return -(Kf.array() / op.mass.array()).matrix() + (op.potential.array() * f.array()).matrix();
}

double mass_norm(const JacobiOperator& op, const Eigen::VectorXd& f) {
  return std::sqrt((op.mass.array() * f.array().square()).sum());
}

JacobiSpectrum jacobi_spectrum(const JacobiOperator& op, int k, double zero_cluster_C) {
  const Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> C = s.asDiagonal() * op.stiffness * s.asDiagonal();
  for (int v = 0; v < C.rows(); ++v) C.coeffRef(v, v) -= op.potential[v];
  C.makeCompressed();

  const double shift = -op.potential.maxCoeff() - 1.0;
  const auto eig = spectral::lowest_eigenpairs(C, k, shift);
  if (!eig.converged) throw NumericalError(ErrorKind::NotConverged, "Jacobi eigensolver did not converge");

  JacobiSpectrum out;
  out.eigenvalues = eig.values;
  out.eigenfunctions = s.asDiagonal() * eig.vectors;
  const double cs = op.curvature_scale;
  out.zero_tol = zero_cluster_C * op.h * cs * cs * cs;
  out.converged = true;
  for (int i = 0; i < k; ++i) {
    if (eig.values[i] < -out.zero_tol) ++out.index;
    else if (std::abs(eig.values[i]) <= out.zero_tol) ++out.zero_cluster;
  }
  return out;
}

JacobiSpectrum jacobi_spectrum(const CmcSphereMesh& m, int k, double zero_cluster_C) {
  const auto adj = mesh::build_adjacency(m.mesh);
  const auto fits = fit::fit_surface(m.mesh, adj, m.normals);
  return jacobi_spectrum(jacobi_operator(m, fits), k, zero_cluster_C);
}

}  // namespace sol3::sphere
