#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include <doctest.h>

#include "sol3/errors.hpp"
#include "sol3/kernels.hpp"
#include "sol3/mesh.hpp"
#include "sol3/sphere.hpp"

using namespace sol3;

namespace {

mesh::TriMesh coordinate_sphere(int n, double r, const Point& c) {
  const auto oct = mesh::octasphere(n);
  mesh::TriMesh m;
  // Left translation keeps the sphere round in the metric.
  for (const auto& d : oct.directions) m.vertices.push_back(group_mul(c, Point::from(r * d)));
  m.faces = oct.faces;
  return m;
}

}  // namespace

TEST_CASE("octasphere counts and symmetry") {
  for (int n : {1, 4, 13}) {
    const auto oct = mesh::octasphere(n);
    CHECK(oct.directions.size() == static_cast<size_t>(4 * n * n + 2));
    mesh::TriMesh m;
    for (const auto& d : oct.directions) {
      CHECK(d.norm() == doctest::Approx(1.0));
      m.vertices.push_back(Point::from(d));
    }
    m.faces = oct.faces;
    CHECK(mesh::euler_characteristic(m) == 2);
    std::set<std::array<long, 3>> keys;
    auto key = [](const Eigen::Vector3d& v) {
      return std::array<long, 3>{std::lround(v[0] * 1e9), std::lround(v[1] * 1e9), std::lround(v[2] * 1e9)};
    };
    for (const auto& d : oct.directions) keys.insert(key(d));
    for (const auto& d : oct.directions) {
      CHECK(keys.count(key(Eigen::Vector3d(d[1], -d[0], -d[2]))) == 1);
      CHECK(keys.count(key(Eigen::Vector3d(-d[0], d[1], d[2]))) == 1);
    }
  }
  CHECK(mesh::frequency_for_vertices(10002) == 50);
  CHECK(mesh::frequency_for_vertices(2502) == 25);
}

TEST_CASE("open meshes are rejected by the Euler characteristic") {
  mesh::TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(mesh::euler_characteristic(m), NumericalError);
}

TEST_CASE("edge length uses the metric at the midpoint") {
  CHECK(mesh::edge_length({0, 0, 0}, {1, 0, 0}) == doctest::Approx(1.0));
  CHECK(mesh::edge_length({0, 0, 1}, {1, 0, 1}) == doctest::Approx(std::exp(1.0)));
  CHECK(mesh::edge_length({0, 0, 1}, {0, 1, 1}) == doctest::Approx(std::exp(-1.0)));
  CHECK(mesh::edge_length({0, 0, 0}, {0, 0, 2}) == doctest::Approx(2.0));
}

TEST_CASE("OBJ round trip keeps positions, H and normals") {
  const auto m = coordinate_sphere(3, 0.5, {0.1, 0.2, 0.3});
  std::vector<FrameVector> normals(m.vertices.size(), FrameVector{0.0, 0.6, 0.8});
  const auto path = (std::filesystem::temp_directory_path() / "sol3_roundtrip.obj").string();
  mesh::write_obj(path, m, 1.25, &normals);
  const auto back = mesh::read_obj(path);
  std::remove(path.c_str());
  REQUIRE(back.H);
  CHECK(*back.H == 1.25);
  REQUIRE(back.mesh.vertices.size() == m.vertices.size());
  CHECK(back.mesh.faces == m.faces);
  for (size_t k = 0; k < m.vertices.size(); ++k) CHECK(back.mesh.vertices[k].vec() == m.vertices[k].vec());
  REQUIRE(back.normals.size() == normals.size());
  CHECK(back.normals[5].c3 == 0.8);
}

TEST_CASE("mixed corner areas") {
  const double eq[3] = {1, 1, 1};
  const auto a = kernels::mixed_corner_areas(eq);
  const double area = std::sqrt(3.0) / 4;
  for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(area / 3));
  // Obtuse at corner 0 (opposite the long side).
  const double ob[3] = {1.9, 1.0, 1.0};
  const auto b = kernels::mixed_corner_areas(ob);
  const double s = 0.5 * (1.9 + 2.0), tri = std::sqrt(s * (s - 1.9) * (s - 1) * (s - 1));
  CHECK(b[0] == doctest::Approx(tri / 2));
  CHECK(b[1] == doctest::Approx(tri / 4));
  CHECK(b[2] == doctest::Approx(tri / 4));
}

TEST_CASE("small coordinate spheres: H_v ~ 1/r at every vertex, including valence four") {
  const double r = 1e-3;
  const auto m = coordinate_sphere(12, r, {0.3, -0.4, 0.5});
  const auto adj = mesh::build_adjacency(m);
  const auto H = kernels::parallel::mean_curvature(m, adj);
  for (double h : H) CHECK(h * r == doctest::Approx(1.0).epsilon(5e-3));
  const auto av = kernels::parallel::area_volume(m, adj);
  double sum = 0.0;
  for (double a : av.vertex_area) sum += a;
  CHECK(sum == doctest::Approx(av.area).epsilon(1e-2));
  CHECK(av.area == doctest::Approx(4 * M_PI * r * r).epsilon(1e-2));
  CHECK(av.volume == doctest::Approx(4 * M_PI * r * r * r / 3).epsilon(1e-2));
}

TEST_CASE("area/volume kernels: serial and parallel agree") {
  mesh::TriMesh m;
  const auto oct = mesh::octasphere(9);
  for (const auto& d : oct.directions) m.vertices.push_back(sphere::graph_point(0.9 + 0.2 * d[0] * d[1], d));
  for (auto& p : m.vertices) p = group_mul(Point{0.3, -0.1, 0.2}, p);
  m.faces = oct.faces;
  const auto adj = mesh::build_adjacency(m);
  const auto s = kernels::serial::area_volume(m);
  const auto p = kernels::parallel::area_volume(m, adj);
  CHECK(p.area == doctest::Approx(s.area).epsilon(1e-13));
  CHECK(p.volume == doctest::Approx(s.volume).epsilon(1e-13));
  CHECK((p.area_grad - s.area_grad).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((p.volume_grad - s.volume_grad).cwiseAbs().maxCoeff() < 1e-13);
  for (size_t k = 0; k < s.vertex_area.size(); ++k)
    CHECK(p.vertex_area[k] == doctest::Approx(s.vertex_area[k]).epsilon(1e-13));
  const auto hs = kernels::serial::mean_curvature(m);
  const auto hp = kernels::parallel::mean_curvature(m, adj);
  for (size_t k = 0; k < hs.size(); ++k) CHECK(hp[k] == doctest::Approx(hs[k]).epsilon(1e-12));
}

TEST_CASE("area and volume are invariant under isometries") {
  const auto oct = mesh::octasphere(8);
  mesh::TriMesh m;
  for (const auto& d : oct.directions) m.vertices.push_back(sphere::graph_point(0.7, d));
  m.faces = oct.faces;
  const auto base = kernels::serial::area_volume(m);
  for (const Isometry& f : {Isometry::translation(Point{1.0, -2.0, 0.7}), Isometry::sigma()}) {
    mesh::TriMesh t = m;
    for (auto& p : t.vertices) p = f.apply(p);
    const auto moved = kernels::serial::area_volume(t);
    // Faces are split into four, so the area is exact only to discretization.
    CHECK(moved.area == doctest::Approx(base.area).epsilon(2e-3));
    CHECK(std::abs(moved.volume) == doctest::Approx(std::abs(base.volume)).epsilon(2e-3));
  }
}
