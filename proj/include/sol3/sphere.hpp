#pragma once

// Constant mean curvature spheres in Sol3 as radial graphs over a fixed
// octahedral triangulation, solved by Newton's method on the discrete mean
// curvature H_v = <dA, N> / (2 A_v), N the unit direction of dV and A_v the
// mixed Voronoi area (replaced by a local fit at irregular vertices).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sol3/core.hpp"
#include "sol3/gauss_map.hpp"
#include "sol3/mesh.hpp"

namespace sol3::sphere {

struct CmcSphereMesh {
  mesh::TriMesh mesh;
  double target_H = 0.0;
  std::vector<FrameVector> normals;  // unit, pointing into the enclosed domain
  std::vector<double> mean_curvature;
  std::vector<gauss::ExtendedComplex> gauss;
  std::vector<double> vertex_area;
  double area = 0.0;
  double volume = 0.0;

  // Radial-graph data when produced by the solver (empty otherwise).
  std::vector<Eigen::Vector3d> directions;
  std::vector<double> radii;
  std::vector<std::array<int, 3>> lattice;
  int iterations = 0;
  double residual = 0.0;  // max |H_v - target_H| at exit
};

struct SolveOptions {
  int resolution = 10002;  // target vertex count
  double tol = 1e-2;       // acceptance bound on max |H_v - H|
  int max_iters = 40;      // Newton iterations per continuation step
  double newton_tol = 1e-10;
  /// Restrict to surfaces invariant under sigma and tau about the origin.
  bool symmetric = true;
  /// Largest H solved directly from a coordinate sphere; smaller targets are
  /// reached by continuation from here.
  double direct_H = 2.5;
  std::function<void(const std::string&)> log;
};

/// Vertex of the graph over direction d at parameter r: the point reached
/// from the origin by rising r d3 along x3 and then moving (r d1, r d2) in
/// the leaf. Leaf steps have unit metric length, so the octasphere stays
/// nearly isotropic at every height. Commutes with sigma and tau.
Point graph_point(double r, const Eigen::Vector3d& d);

/// Inward unit normals (frame components) from the volume gradient.
std::vector<FrameVector> vertex_normals(const mesh::TriMesh& m, const mesh::Adjacency& adj);

/// Mixed Voronoi areas from intrinsic edge lengths.
std::vector<double> vertex_areas(const mesh::TriMesh& m, const mesh::Adjacency& adj);

/// Mean curvature per vertex: the discrete H_v at valence-6 vertices and the
/// cubic-fit value elsewhere, because H_v is not consistent at irregular
/// vertices of non-umbilic surfaces. Throws DegenerateMesh on a zero star.
std::vector<double> mean_curvature_field(const mesh::TriMesh& m);

/// Fills normals, mean curvature, Gauss map, areas and volume for any closed mesh.
CmcSphereMesh describe(const mesh::TriMesh& m, double target_H);

/// Throws NotConverged if Newton fails or the result misses opts.tol,
/// DegenerateMesh on collapsed triangles.
CmcSphereMesh solve(double H, const SolveOptions& opts = {});

/// Newton from a previous solution rescaled by its H over the new one.
CmcSphereMesh solve_from(const CmcSphereMesh& warm, double H, const SolveOptions& opts = {});

struct FamilyMember {
  CmcSphereMesh sphere;
  bool converged = false;
  std::string error;
};

/// Warm-started solves along the targets, in order. Stops at the first
/// failure (the failing entry is included with converged = false).
std::vector<FamilyMember> continue_family(const CmcSphereMesh& m0, const std::vector<double>& targets,
                                          const SolveOptions& opts = {});

/// D4 orbits of the octasphere vertices under sigma and tau.
std::vector<int> symmetry_orbits(const mesh::Octasphere& oct, int* num_orbits);

}  // namespace sol3::sphere
