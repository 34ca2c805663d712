#pragma once

// Hot loops in two flavors. `serial` is the reference: plain loops that
// scatter per-face contributions. `parallel` is the OpenMP version used by
// the library: per-face work into a buffer, then a per-vertex gather, so no
// two threads write the same entry. Both must agree to rounding.

#include <vector>

#include <Eigen/Core>

#include "sol3/gauss_map.hpp"
#include "sol3/mesh.hpp"

namespace sol3::kernels {

using Gradient = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Induced Sol3 area with each face split once into four; returns the total
/// and fills the gradient with respect to vertex coordinates.
struct AreaVolume {
  double area = 0.0;
  double volume = 0.0;  // signed, Haar measure dx1 dx2 dx3
  Gradient area_grad;
  Gradient volume_grad;
  std::vector<double> vertex_area;  // mixed Voronoi areas
};

/// Area and signed-volume contributions of one face, with the gradients with
/// respect to its three corners (rows).
struct FaceTerms {
  double area = 0.0;
  double volume = 0.0;
  Eigen::Matrix3d area_grad;
  Eigen::Matrix3d volume_grad;
  Eigen::Vector3d corner_area;  // mixed Voronoi share of each corner
};
FaceTerms face_terms(const Point& p0, const Point& p1, const Point& p2);

/// Mixed Voronoi shares of a triangle with side lengths len[k] opposite
/// corner k: circumcentric cells for acute triangles, half the area at an
/// obtuse corner and a quarter at the other two.
Eigen::Vector3d mixed_corner_areas(const double len[3]);

/// Discrete mean curvature <dA, N> / (2 A_v) per vertex, with N the unit
/// (inverse-metric) direction of dV and A_v the mixed Voronoi area.
std::vector<double> mean_curvature_from_gradients(const mesh::TriMesh& m, const AreaVolume& av);

namespace serial {
AreaVolume area_volume(const mesh::TriMesh& m);
std::vector<double> mean_curvature(const mesh::TriMesh& m);
void pde_residual(const gauss::GaussField& f, gauss::ResidualGrid& out,
                  gauss::Stencil stencil = gauss::Stencil::Second);
}  // namespace serial

namespace parallel {
AreaVolume area_volume(const mesh::TriMesh& m, const mesh::Adjacency& adj);
std::vector<double> mean_curvature(const mesh::TriMesh& m, const mesh::Adjacency& adj);
void pde_residual(const gauss::GaussField& f, gauss::ResidualGrid& out,
                  gauss::Stencil stencil = gauss::Stencil::Second);
}  // namespace parallel

}  // namespace sol3::kernels
