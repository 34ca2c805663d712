#include "sol3/kernels.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "sol3/errors.hpp"

namespace sol3::kernels {

namespace {

// Flat-in-coordinates triangle a, b, c: area 1/2 sqrt(n^T D n) with n the
// Euclidean cross product and D = diag(e^{-2c}, e^{2c}, 1) at the mean height c.
double subtriangle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                   Eigen::Vector3d& ga, Eigen::Vector3d& gb, Eigen::Vector3d& gc) {
  const Eigen::Vector3d n = (b - a).cross(c - a);
  const double h = (a[2] + b[2] + c[2]) / 3.0;
  const double em = std::exp(-2.0 * h);
  const double ep = std::exp(2.0 * h);
  const double s = std::sqrt(em * n[0] * n[0] + ep * n[1] * n[1] + n[2] * n[2]);
  if (s == 0.0) {
    ga.setZero();
    gb.setZero();
    gc.setZero();
    return 0.0;
  }
  const Eigen::Vector3d m(0.5 * em * n[0] / s, 0.5 * ep * n[1] / s, 0.5 * n[2] / s);
  const double dh = (-em * n[0] * n[0] + ep * n[1] * n[1]) / (2.0 * s) / 3.0;
  ga = m.cross(c - b);
  gb = m.cross(a - c);
  gc = m.cross(b - a);
  ga[2] += dh;
  gb[2] += dh;
  gc[2] += dh;
  return 0.5 * s;
}

}  // namespace

Eigen::Vector3d mixed_corner_areas(const double len[3]) {
  const double s = 0.5 * (len[0] + len[1] + len[2]);
  const double a2 = s * (s - len[0]) * (s - len[1]) * (s - len[2]);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  if (!(a2 > 0.0)) return out;
  const double area = std::sqrt(a2);
  double sq[3], cot[3];
  for (int k = 0; k < 3; ++k) sq[k] = len[k] * len[k];
  for (int k = 0; k < 3; ++k) cot[k] = (sq[(k + 1) % 3] + sq[(k + 2) % 3] - sq[k]) / (4.0 * area);
  for (int k = 0; k < 3; ++k) {
    if (cot[k] < 0.0) {
      out.setConstant(0.25 * area);
      out[k] = 0.5 * area;
      return out;
    }
  }
  // Corner k borders the sides opposite k+1 and k+2.
  for (int k = 0; k < 3; ++k)
    out[k] = (sq[(k + 1) % 3] * cot[(k + 1) % 3] + sq[(k + 2) % 3] * cot[(k + 2) % 3]) / 8.0;
  return out;
}

FaceTerms face_terms(const Point& p0, const Point& p1, const Point& p2) {
  const Eigen::Vector3d p[3] = {p0.vec(), p1.vec(), p2.vec()};
  const Eigen::Vector3d mid[3] = {0.5 * (p[0] + p[1]), 0.5 * (p[1] + p[2]), 0.5 * (p[2] + p[0])};
  FaceTerms t;
  t.area_grad.setZero();
  Eigen::Vector3d ga, gb, gc;
  // Corner triangles (p_k, m_k, m_{k-1}) and the middle one (m0, m1, m2).
  for (int k = 0; k < 3; ++k) {
    const int km = (k + 2) % 3;
    t.area += subtriangle(p[k], mid[k], mid[km], ga, gb, gc);
    t.area_grad.row(k) += ga;
    t.area_grad.row(k) += 0.5 * gb;
    t.area_grad.row((k + 1) % 3) += 0.5 * gb;
    t.area_grad.row(km) += 0.5 * gc;
    t.area_grad.row(k) += 0.5 * gc;
  }
  t.area += subtriangle(mid[0], mid[1], mid[2], ga, gb, gc);
  const Eigen::Vector3d gm[3] = {ga, gb, gc};
  for (int k = 0; k < 3; ++k) {
    t.area_grad.row(k) += 0.5 * gm[k];
    t.area_grad.row((k + 1) % 3) += 0.5 * gm[k];
  }
  const Point* corner[3] = {&p0, &p1, &p2};
  double len[3];
  for (int k = 0; k < 3; ++k) len[k] = mesh::edge_length(*corner[(k + 1) % 3], *corner[(k + 2) % 3]);
  t.corner_area = mixed_corner_areas(len);
  t.volume = p[0].dot(p[1].cross(p[2])) / 6.0;
  t.volume_grad.row(0) = p[1].cross(p[2]) / 6.0;
  t.volume_grad.row(1) = p[2].cross(p[0]) / 6.0;
  t.volume_grad.row(2) = p[0].cross(p[1]) / 6.0;
  return t;
}

std::vector<double> mean_curvature_from_gradients(const mesh::TriMesh& m, const AreaVolume& av) {
  std::vector<double> h(m.num_vertices());
  int degenerate = 0;  // exceptions must not leave the parallel region
#pragma omp parallel for schedule(static) reduction(+ : degenerate)
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Eigen::Vector3d gi = inverse_metric_diagonal(m.vertices[v]);
    const Eigen::Vector3d a = av.area_grad.row(v).transpose();
    const Eigen::Vector3d w = av.volume_grad.row(v).transpose();
    const double vv = w.dot(gi.cwiseProduct(w));
    if (vv == 0.0 || av.vertex_area[v] <= 0.0) {
      ++degenerate;
      continue;
    }
    h[v] = a.dot(gi.cwiseProduct(w)) / (2.0 * std::sqrt(vv) * av.vertex_area[v]);
  }
  if (degenerate > 0) throw NumericalError(ErrorKind::DegenerateMesh, "zero volume gradient at a vertex");
  return h;
}

namespace serial {

AreaVolume area_volume(const mesh::TriMesh& m) {
  AreaVolume av;
  av.area_grad = Gradient::Zero(m.num_vertices(), 3);
  av.volume_grad = Gradient::Zero(m.num_vertices(), 3);
  av.vertex_area.assign(m.num_vertices(), 0.0);
  for (const auto& f : m.faces) {
    const FaceTerms t = face_terms(m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]);
    av.area += t.area;
    av.volume += t.volume;
    for (int k = 0; k < 3; ++k) {
      av.area_grad.row(f[k]) += t.area_grad.row(k);
      av.volume_grad.row(f[k]) += t.volume_grad.row(k);
      av.vertex_area[f[k]] += t.corner_area[k];
    }
  }
  return av;
}

std::vector<double> mean_curvature(const mesh::TriMesh& m) {
  const AreaVolume av = area_volume(m);
  std::vector<double> h(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Eigen::Vector3d gi = inverse_metric_diagonal(m.vertices[v]);
    const Eigen::Vector3d a = av.area_grad.row(v).transpose();
    const Eigen::Vector3d w = av.volume_grad.row(v).transpose();
    const double vv = w.dot(gi.cwiseProduct(w));
    if (vv == 0.0 || av.vertex_area[v] <= 0.0)
      throw NumericalError(ErrorKind::DegenerateMesh, "zero volume gradient or vertex area");
    h[v] = a.dot(gi.cwiseProduct(w)) / (2.0 * std::sqrt(vv) * av.vertex_area[v]);
  }
  return h;
}

void pde_residual(const gauss::GaussField& f, gauss::ResidualGrid& out, gauss::Stencil stencil) {
  const int r = gauss::stencil_margin(stencil);
  const gauss::GridSpec& gs = *f.grid;
  out.grid = gs;
  out.values.assign(gs.size(), {0.0, 0.0});
  out.present.assign(gs.size(), 0);
  for (int i = r; i + r < gs.nu; ++i) {
    for (int j = r; j + r < gs.nv; ++j) {
      out.values[gs.index(i, j)] = gauss::pde_residual_at(f, i, j, stencil);
      out.present[gs.index(i, j)] = 1;
    }
  }
}

}  // namespace serial

namespace parallel {

AreaVolume area_volume(const mesh::TriMesh& m, const mesh::Adjacency& adj) {
  const int nf = m.num_faces();
  std::vector<FaceTerms> terms(nf);
  double area = 0.0, volume = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : area, volume)
  for (int f = 0; f < nf; ++f) {
    const auto& face = m.faces[f];
    terms[f] = face_terms(m.vertices[face[0]], m.vertices[face[1]], m.vertices[face[2]]);
    area += terms[f].area;
    volume += terms[f].volume;
  }
  AreaVolume av;
  av.area = area;
  av.volume = volume;
  av.area_grad = Gradient::Zero(m.num_vertices(), 3);
  av.volume_grad = Gradient::Zero(m.num_vertices(), 3);
  av.vertex_area.assign(m.num_vertices(), 0.0);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < m.num_vertices(); ++v) {
    for (int f : adj.vertex_faces[v]) {
      const auto& face = m.faces[f];
      const int k = face[0] == v ? 0 : (face[1] == v ? 1 : 2);
      av.area_grad.row(v) += terms[f].area_grad.row(k);
      av.volume_grad.row(v) += terms[f].volume_grad.row(k);
      av.vertex_area[v] += terms[f].corner_area[k];
    }
  }
  return av;
}

std::vector<double> mean_curvature(const mesh::TriMesh& m, const mesh::Adjacency& adj) {
  return mean_curvature_from_gradients(m, area_volume(m, adj));
}

void pde_residual(const gauss::GaussField& f, gauss::ResidualGrid& out, gauss::Stencil stencil) {
  const int r = gauss::stencil_margin(stencil);
  const gauss::GridSpec& gs = *f.grid;
  out.grid = gs;
  out.values.assign(gs.size(), {0.0, 0.0});
  out.present.assign(gs.size(), 0);
#pragma omp parallel for collapse(2) schedule(static)
  for (int i = r; i < gs.nu - r; ++i) {
    for (int j = r; j < gs.nv - r; ++j) {
      out.values[gs.index(i, j)] = gauss::pde_residual_at(f, i, j, stencil);
      out.present[gs.index(i, j)] = 1;
    }
  }
}

}  // namespace parallel

}  // namespace sol3::kernels
