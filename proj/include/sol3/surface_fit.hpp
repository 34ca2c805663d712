#pragma once

// Per-vertex local fits on a triangle mesh in Sol3. Each neighborhood is
// left-translated so the vertex sits at the origin, where the metric is the
// identity, and fitted there as a height function over the tangent plane.

#include <vector>

#include <Eigen/Core>

#include "sol3/core.hpp"
#include "sol3/gauss_map.hpp"
#include "sol3/mesh.hpp"

namespace sol3::fit {

struct TangentFrame {
  Eigen::Vector3d e1, e2, n;  // frame components; (e1, e2, n) right-handed orthonormal
};

/// Orthonormal tangent basis completing n to a right-handed frame.
TangentFrame tangent_frame(const Eigen::Vector3d& n);

struct VertexFit {
  FrameVector normal;  // oriented like the reference normal
  double mean = 0.0;   // positive when the surface bends toward the normal
  double gauss_ext = 0.0;
  double norm_b2 = 0.0;
  TangentFrame frame;  // tangent plane of the fitted jet
  double rms = 0.0;    // fit residual
};

/// Cubic height fit over `neighbors` (at least 9 of them).
VertexFit fit_vertex(const mesh::TriMesh& m, int v, const std::vector<int>& neighbors,
                     const FrameVector& reference_normal);

std::vector<VertexFit> fit_surface(const mesh::TriMesh& m, const mesh::Adjacency& adj,
                                   const std::vector<FrameVector>& reference_normals, int rings = 2);

/// Stereographic Gauss map value of a unit frame normal, (N1 + i N2)/(1 + N3).
gauss::ExtendedComplex gauss_value(const FrameVector& n);

/// Gauss map sample at a vertex: value in the chart where it is bounded by 1
/// and z-derivatives for z = s + i t, with s, t coordinates along the fitted
/// tangent frame. `values` holds the Gauss map at every vertex.
struct GaussJet {
  gauss::GaussSample sample;
  double jacobian = 0.0;  // |g_z|^2 - |g_zbar|^2
};
GaussJet gauss_jet(const mesh::TriMesh& m, int v, const std::vector<int>& neighbors,
                   const TangentFrame& frame, const std::vector<gauss::ExtendedComplex>& values);

/// Position of q relative to p after left translation by p^{-1}.
Eigen::Vector3d relative_position(const Point& p, const Point& q);

}  // namespace sol3::fit
