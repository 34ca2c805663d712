#include "sol3/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <queue>
#include <sstream>

#include "sol3/errors.hpp"

namespace sol3::mesh {

Adjacency build_adjacency(const TriMesh& m) {
  Adjacency adj;
  const int nv = m.num_vertices();
  adj.vertex_faces.assign(nv, {});
  adj.neighbors.assign(nv, {});
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = m.faces[f][k];
      const int b = m.faces[f][(k + 1) % 3];
      adj.vertex_faces[a].push_back(f);
      adj.neighbors[a].push_back(b);
      adj.neighbors[b].push_back(a);
    }
  }
  for (int v = 0; v < nv; ++v) {
    auto& nb = adj.neighbors[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (int w : nb)
      if (v < w) adj.edges.push_back({v, w});
  }
  return adj;
}

int euler_characteristic(const TriMesh& m) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  for (const auto& [e, c] : edge_count)
    if (c != 2) throw NumericalError(ErrorKind::DegenerateMesh, "mesh is not a closed 2-manifold");
  return m.num_vertices() - static_cast<int>(edge_count.size()) + m.num_faces();
}

Octasphere octasphere(int n) {
  if (n < 1) throw NumericalError(ErrorKind::InvalidArgument, "frequency must be >= 1");
  Octasphere out;
  out.frequency = n;
  // Lattice points (a, b, c) with |a| + |b| + |c| = n on the octahedron.
  std::map<std::array<int, 3>, int> index;
  auto vertex = [&](int a, int b, int c) {
    const std::array<int, 3> key{a, b, c};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(out.directions.size());
    out.directions.push_back(Eigen::Vector3d(a, b, c).normalized());
    out.lattice.push_back(key);
    index.emplace(key, id);
    return id;
  };
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) {
        // Octant face with corners n*e_x, n*e_y, n*e_z (signed). Lattice
        // coordinates (i, j) count steps toward the y and z corners.
        const bool flip = sx * sy * sz < 0;
        auto at = [&](int i, int j) { return vertex(sx * (n - i - j), sy * i, sz * j); };
        auto emit = [&](int a, int b, int c) {
          if (flip)
            out.faces.push_back({a, c, b});
          else
            out.faces.push_back({a, b, c});
        };
        for (int i = 0; i < n; ++i) {
          for (int j = 0; i + j < n; ++j) {
            emit(at(i, j), at(i + 1, j), at(i, j + 1));
            if (i + j + 2 <= n) emit(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
          }
        }
      }
    }
  }
  return out;
}

int frequency_for_vertices(int target_vertices) {
  const double n = std::sqrt(std::max(0.0, (target_vertices - 2) / 4.0));
  return std::max(1, static_cast<int>(std::lround(n)));
}

double edge_length(const Point& a, const Point& b) {
  const Point mid{0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2), 0.5 * (a.x3 + b.x3)};
  const Eigen::Vector3d d = b.vec() - a.vec();
  return std::sqrt(metric_eval(mid, d, d));
}

double mean_edge_length(const TriMesh& m, const Adjacency& adj) {
  if (adj.edges.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : adj.edges) s += edge_length(m.vertices[e[0]], m.vertices[e[1]]);
  return s / static_cast<double>(adj.edges.size());
}

std::vector<int> k_ring(const Adjacency& adj, int v, int rings) {
  std::vector<int> out;
  std::vector<int> frontier{v};
  std::vector<int> seen{v};
  for (int r = 0; r < rings; ++r) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int w : adj.neighbors[u]) {
        if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
        seen.push_back(w);
        next.push_back(w);
        out.push_back(w);
      }
    }
    frontier.swap(next);
  }
  return out;
}

void write_obj(const std::string& path, const TriMesh& m, double H,
               const std::vector<FrameVector>* normals) {
  std::ofstream os(path);
  if (!os) throw NumericalError(ErrorKind::Io, "cannot write " + path);
  os << std::setprecision(17);
  os << "# H " << H << "\n";
  for (const auto& p : m.vertices) os << "v " << p.x1 << ' ' << p.x2 << ' ' << p.x3 << "\n";
  if (normals)
    for (const auto& n : *normals) os << "#fn " << n.c1 << ' ' << n.c2 << ' ' << n.c3 << "\n";
  for (const auto& f : m.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << "\n";
}

ObjData read_obj(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw NumericalError(ErrorKind::Io, "cannot read " + path);
  ObjData out;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Point p;
      ls >> p.x1 >> p.x2 >> p.x3;
      out.mesh.vertices.push_back(p);
    } else if (tag == "f") {
      Face f{};
      for (int k = 0; k < 3; ++k) {
        std::string tok;
        ls >> tok;
        f[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;  // accepts "i/j/k" forms
      }
      out.mesh.faces.push_back(f);
    } else if (tag == "#fn") {
      FrameVector n;
      ls >> n.c1 >> n.c2 >> n.c3;
      out.normals.push_back(n);
    } else if (tag == "#") {
      std::string key;
      double value = 0.0;
      if (ls >> key >> value && key == "H") out.H = value;
    }
    if (!ls && tag != "#" && !tag.empty())
      throw NumericalError(ErrorKind::Io, "malformed OBJ line: " + line);
  }
  for (const auto& f : out.mesh.faces)
    for (int v : f)
      if (v < 0 || v >= out.mesh.num_vertices())
        throw NumericalError(ErrorKind::Io, "face index out of range in " + path);
  return out;
}

}  // namespace sol3::mesh
