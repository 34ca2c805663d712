#pragma once

// Closed triangle meshes with vertices in model coordinates.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sol3/core.hpp"

namespace sol3::mesh {

using Face = std::array<int, 3>;

struct TriMesh {
  std::vector<Point> vertices;
  std::vector<Face> faces;  // counterclockwise seen from outside

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
};

struct Adjacency {
  std::vector<std::vector<int>> vertex_faces;
  std::vector<std::vector<int>> neighbors;  // sorted
  std::vector<std::array<int, 2>> edges;    // (a, b) with a < b
};

Adjacency build_adjacency(const TriMesh& m);

/// V - E + F. Throws DegenerateMesh if some edge is not shared by exactly two faces.
int euler_characteristic(const TriMesh& m);

/// Unit directions of the frequency-n subdivided octahedron, projected to the
/// unit sphere: 4n^2 + 2 vertices, invariant under all signed coordinate
/// permutations. Faces are outward oriented.
struct Octasphere {
  std::vector<Eigen::Vector3d> directions;
  std::vector<std::array<int, 3>> lattice;  // (a, b, c) with |a| + |b| + |c| = n
  std::vector<Face> faces;
  int frequency = 0;
};
Octasphere octasphere(int n);

/// Frequency whose vertex count 4n^2 + 2 is closest to `target_vertices`.
int frequency_for_vertices(int target_vertices);

/// Length of segment ab measured with the metric at its midpoint.
double edge_length(const Point& a, const Point& b);
double mean_edge_length(const TriMesh& m, const Adjacency& adj);

/// Vertices reachable within `rings` edges of v (excluding v), breadth first.
std::vector<int> k_ring(const Adjacency& adj, int v, int rings);

// OBJ: positions in model coordinates, a "# H <value>" comment, and frame
// normals as "#fn n1 n2 n3" lines in vertex order.
void write_obj(const std::string& path, const TriMesh& m, double H,
               const std::vector<FrameVector>* normals = nullptr);

struct ObjData {
  TriMesh mesh;
  std::optional<double> H;
  std::vector<FrameVector> normals;
};
ObjData read_obj(const std::string& path);

}  // namespace sol3::mesh
