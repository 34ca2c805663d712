#include "sol3/surface_fit.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "sol3/errors.hpp"

namespace sol3::fit {

TangentFrame tangent_frame(const Eigen::Vector3d& n_in) {
  TangentFrame f;
  f.n = n_in.normalized();
  const Eigen::Vector3d seed =
      std::abs(f.n[0]) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  f.e1 = (seed - seed.dot(f.n) * f.n).normalized();
  f.e2 = f.n.cross(f.e1);
  return f;
}

Eigen::Vector3d relative_position(const Point& p, const Point& q) {
  return group_mul(group_inverse(p), q).vec();
}

VertexFit fit_vertex(const mesh::TriMesh& m, int v, const std::vector<int>& neighbors,
                     const FrameVector& reference_normal) {
  const int k = static_cast<int>(neighbors.size());
  if (k < 9) throw NumericalError(ErrorKind::DegenerateMesh, "cubic fit needs 9 neighbors");
  const Point& p = m.vertices[v];
  // At the origin the frame and coordinate bases coincide.
  const TangentFrame base = tangent_frame(reference_normal.vec());
  Eigen::MatrixXd A(k, 9);
  Eigen::VectorXd b(k);
  for (int r = 0; r < k; ++r) {
    const Eigen::Vector3d q = relative_position(p, m.vertices[neighbors[r]]);
    const double s = q.dot(base.e1), t = q.dot(base.e2);
    A.row(r) << s, t, s * s, s * t, t * t, s * s * s, s * s * t, s * t * t, t * t * t;
    b[r] = q.dot(base.n);
  }
  // Column scaling keeps the normal equations well conditioned on small stars.
  const Eigen::VectorXd scale = A.colwise().norm().transpose().cwiseMax(1e-300);
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  const Eigen::VectorXd cs = As.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd c = cs.cwiseQuotient(scale);

  SurfaceJet jet;
  jet.x = Point{0.0, 0.0, 0.0};
  jet.xs = base.e1 + c[0] * base.n;
  jet.xt = base.e2 + c[1] * base.n;
  jet.xss = 2.0 * c[2] * base.n;
  jet.xst = c[3] * base.n;
  jet.xtt = 2.0 * c[4] * base.n;
  SurfaceCurvature sc = surface_curvature(jet);

  VertexFit out;
  Eigen::Vector3d n = sc.normal.vec();
  double mean = sc.mean;
  if (n.dot(base.n) < 0.0) {
    n = -n;
    mean = -mean;
  }
  out.normal = FrameVector::from(n);
  out.mean = mean;
  out.gauss_ext = sc.gauss_ext;
  out.norm_b2 = sc.norm_b2;
  out.frame = tangent_frame(n);
  out.rms = std::sqrt((A * c - b).squaredNorm() / k);
  return out;
}

std::vector<VertexFit> fit_surface(const mesh::TriMesh& m, const mesh::Adjacency& adj,
                                   const std::vector<FrameVector>& reference_normals, int rings) {
  std::vector<VertexFit> out(m.num_vertices());
  int failures = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : failures)
  for (int v = 0; v < m.num_vertices(); ++v) {
    try {
      out[v] = fit_vertex(m, v, mesh::k_ring(adj, v, rings), reference_normals[v]);
    } catch (const NumericalError&) {
      ++failures;
    }
  }
  if (failures > 0)
    throw NumericalError(ErrorKind::DegenerateMesh, std::to_string(failures) + " vertex fits failed");
  return out;
}

gauss::ExtendedComplex gauss_value(const FrameVector& n) {
  const double den = 1.0 + n.c3;
  if (den <= 0.0) return gauss::ExtendedComplex::infinity();
  return gauss::ExtendedComplex(gauss::cplx{n.c1 / den, n.c2 / den});
}

GaussJet gauss_jet(const mesh::TriMesh& m, int v, const std::vector<int>& neighbors,
                   const TangentFrame& frame, const std::vector<gauss::ExtendedComplex>& values) {
  const int k = static_cast<int>(neighbors.size());
  if (k < 5) throw NumericalError(ErrorKind::DegenerateMesh, "gauss jet needs 5 neighbors");
  const gauss::ExtendedComplex gv = values[v];
  const bool dual = gv.abs() > 1.0;
  auto chart_value = [&](const gauss::ExtendedComplex& g) {
    const gauss::ExtendedComplex c = dual ? g.dual() : g;
    if (c.is_infinite()) throw NumericalError(ErrorKind::Degenerate, "pole inside a gauss jet star");
    return c.value();
  };
  const gauss::cplx center = chart_value(gv);
  Eigen::MatrixXd A(k, 5);
  Eigen::VectorXcd b(k);
  const Point& p = m.vertices[v];
  for (int r = 0; r < k; ++r) {
    const Eigen::Vector3d q = relative_position(p, m.vertices[neighbors[r]]);
    const double s = q.dot(frame.e1), t = q.dot(frame.e2);
    A.row(r) << s, t, s * s, s * t, t * t;
    b[r] = chart_value(values[neighbors[r]]) - center;
  }
  const Eigen::VectorXd scale = A.colwise().norm().transpose().cwiseMax(1e-300);
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  const auto qr = As.colPivHouseholderQr();
  const Eigen::VectorXd re = qr.solve(b.real()).cwiseQuotient(scale);
  const Eigen::VectorXd im = qr.solve(b.imag()).cwiseQuotient(scale);
  const gauss::cplx ds{re[0], im[0]}, dt{re[1], im[1]};
  GaussJet out;
  out.sample.chart = dual ? gauss::Chart::Dual : gauss::Chart::Direct;
  out.sample.value = center;
  out.sample.dz = 0.5 * (ds - gauss::cplx{0.0, 1.0} * dt);
  out.sample.dzbar = 0.5 * (ds + gauss::cplx{0.0, 1.0} * dt);
  out.jacobian = std::norm(out.sample.dz) - std::norm(out.sample.dzbar);
  return out;
}

}  // namespace sol3::fit
