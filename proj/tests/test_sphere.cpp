#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <doctest.h>

#include "sol3/cylinders.hpp"
#include "sol3/errors.hpp"
#include "sol3/jacobi.hpp"
#include "sol3/sphere.hpp"
#include "sol3/sphere_report.hpp"
#include "sol3/surface_fit.hpp"

using namespace sol3;

namespace {

// Solves are shared between test cases.
const sphere::CmcSphereMesh& solved(double H, int res) {
  static std::map<std::pair<double, int>, sphere::CmcSphereMesh> cache;
  auto it = cache.find({H, res});
  if (it == cache.end()) {
    sphere::SolveOptions o;
    o.resolution = res;
    it = cache.emplace(std::make_pair(H, res), sphere::solve(H, o)).first;
  }
  return it->second;
}

const sphere::VerificationReport& report(double H, int res) {
  static std::map<std::pair<double, int>, sphere::VerificationReport> cache;
  auto it = cache.find({H, res});
  if (it == cache.end()) it = cache.emplace(std::make_pair(H, res), sphere::geometry_report(solved(H, res))).first;
  return it->second;
}

// Closed surface with no symmetry: a bumpy graph over the octasphere,
// translated off the origin.
mesh::TriMesh lumpy(int n) {
  const auto oct = mesh::octasphere(n);
  mesh::TriMesh m;
  for (const auto& d : oct.directions) {
    const double r = 1.0 + 0.1 * d[0] + 0.2 * d[0] * d[1] + 0.15 * d[2] * d[2] * d[2];
    m.vertices.push_back(group_mul(Point{0.3, -0.2, 0.4}, Point{r * d[0], 0.7 * r * d[1], 0.5 * r * d[2]}));
  }
  m.faces = oct.faces;
  return m;
}

mesh::TriMesh scaled(const mesh::TriMesh& m, double s) {
  mesh::TriMesh out = m;
  for (auto& p : out.vertices) p = Point::from(s * p.vec());
  return out;
}

}  // namespace

TEST_CASE("bounds") {
  CHECK(sphere::b2_bound(1.0) == 10.0);
  CHECK(sphere::diameter_bound(1.0) == doctest::Approx(8 * std::numbers::pi / std::sqrt(6.0)));
  CHECK(sphere::diameter_bound(1.0) == doctest::Approx(10.2604).epsilon(1e-5));
  CHECK(std::isnan(sphere::diameter_bound(0.5)));
}

TEST_CASE("graph_point commutes with sigma and tau") {
  const Eigen::Vector3d d = Eigen::Vector3d(0.3, -0.5, 0.81).normalized();
  const double r = 1.3;
  const Point p = sphere::graph_point(r, d);
  const Point s = sphere::graph_point(r, Eigen::Vector3d(d[1], -d[0], -d[2]));
  const Point t = sphere::graph_point(r, Eigen::Vector3d(-d[0], d[1], d[2]));
  CHECK((Isometry::sigma().apply(p).vec() - s.vec()).norm() < 1e-14);
  CHECK((Isometry::tau().apply(p).vec() - t.vec()).norm() < 1e-14);
}

TEST_CASE("solved sphere at H = 1 passes every check") {
  const auto& m = solved(1.0, 2502);
  CHECK(m.mesh.num_vertices() == 2502);
  CHECK(m.residual <= 1e-2);
  const auto& r = report(1.0, 2502);
  for (const auto& f : r.failures) INFO(f);
  CHECK(r.passed());
  CHECK(r.euler == 2);
  CHECK(r.B2max < r.B2bound);
  CHECK(r.diameter <= r.diameterBound);
  CHECK(r.spectrum.index == 1);
  CHECK(r.spectrum.zero_cluster == 3);
  CHECK(r.embedding.embedded);
  CHECK(r.bigraph.bigraph);
  CHECK(r.gauss.negative_vertices == 0);
  CHECK(r.gauss.zeros == 1);
  CHECK(r.gauss.poles == 1);
  CHECK(r.symmetry.defect <= 2 * r.h);
  const auto j = sphere::report_json(r);
  for (const char* key : {"H", "maxHdev", "B2max", "B2bound", "diameter", "diameterBound", "index", "zeroCluster",
                          "stokes", "symmetryDefect", "embedded"})
    CHECK(j.contains(key));
  CHECK(j["index"] == 1);
}

TEST_CASE("solution is invariant under sigma and tau") {
  const auto& m = solved(1.0, 1002);
  std::set<std::array<long, 3>> keys;
  auto key = [](const Point& p) {
    return std::array<long, 3>{std::lround(p.x1 * 1e8), std::lround(p.x2 * 1e8), std::lround(p.x3 * 1e8)};
  };
  for (const auto& p : m.mesh.vertices) keys.insert(key(p));
  int missing = 0;
  for (const auto& p : m.mesh.vertices) {
    missing += keys.count(key(Isometry::sigma().apply(p))) == 0;
    missing += keys.count(key(Isometry::tau().apply(p))) == 0;
  }
  CHECK(missing == 0);
  CHECK(sphere::symmetry_defect_at(m.mesh, Point{}) < 1e-6);
}

TEST_CASE("larger H gives a smaller sphere") {
  const auto& a = solved(1.0, 1002);
  const auto& b = solved(2.0, 1002);
  CHECK(b.area < a.area);
  CHECK(b.volume < a.volume);
  // Euclidean scaling would give exactly 4.
  CHECK(a.area / b.area > 3.0);
  CHECK(a.area / b.area < 6.0);
}

TEST_CASE("Killing Jacobi functions converge into the zero cluster") {
  const auto& coarse = report(1.0, 1002);
  const auto& fine = report(1.0, 2502);
  for (int k = 0; k < 3; ++k) {
    CHECK(fine.killing.jacobi_residual[k] < coarse.killing.jacobi_residual[k]);
    CHECK(fine.killing.kernel_defect[k] < coarse.killing.kernel_defect[k]);
    CHECK(fine.killing.kernel_defect[k] < 0.02);
  }
  // The zero cluster shrinks faster than h.
  const double zc = fine.spectrum.eigenvalues.segment(1, 3).cwiseAbs().maxCoeff();
  const double zc0 = coarse.spectrum.eigenvalues.segment(1, 3).cwiseAbs().maxCoeff();
  CHECK(zc / fine.h < zc0 / coarse.h);
}

TEST_CASE("Killing fluxes vanish on a closed surface without symmetry") {
  double prev[3] = {1e9, 1e9, 1e9};
  for (int n : {15, 35}) {
    const auto s = sphere::describe(lumpy(n), 1.0);
    const auto k = sphere::killing_checks(s);
    for (int i = 0; i < 3; ++i) {
      const double f = std::abs(k.stokes_flux[i]) / k.area;
      CHECK(f < prev[i]);
      prev[i] = f;
    }
  }
  for (double f : prev) CHECK(f <= 1e-3);
  // The fluxes are not zero by symmetry here.
  const auto k = sphere::killing_checks(sphere::describe(lumpy(15), 1.0));
  CHECK(std::abs(k.stokes_flux[0]) + std::abs(k.stokes_flux[1]) > 1e-8 * k.area);
}

TEST_CASE("scaled sphere fails the mean curvature check") {
  const auto& m = solved(1.0, 1002);
  const auto bad = sphere::describe(scaled(m.mesh, 1.1), 1.0);
  sphere::ReportOptions o;
  o.spectrum = false;
  const auto r = sphere::geometry_report(bad, o);
  CHECK_FALSE(r.passed());
  CHECK(r.maxHdev > 1e-2);
}

TEST_CASE("overlapping spheres are not embedded") {
  const auto& m = solved(1.0, 1002);
  mesh::TriMesh two = m.mesh;
  const int n = two.num_vertices();
  for (const auto& p : m.mesh.vertices) two.vertices.push_back(group_mul(Point{0.5, 0.0, 0.0}, p));
  for (const auto& f : m.mesh.faces) two.faces.push_back({f[0] + n, f[1] + n, f[2] + n});
  CHECK_FALSE(sphere::check_embedded(two).embedded);
  CHECK(sphere::check_embedded(m.mesh).embedded);
}

TEST_CASE("symmetry search recovers a translated center") {
  const auto& m = solved(1.0, 1002);
  const Point c{0.4, -0.3, 0.2};
  mesh::TriMesh moved = m.mesh;
  for (auto& p : moved.vertices) p = group_mul(c, p);
  const auto adj = mesh::build_adjacency(moved);
  const double h = mesh::mean_edge_length(moved, adj);
  const auto r = sphere::symmetry_defect(moved, Point{0.3, -0.2, 0.1}, h);
  CHECK(r.defect <= 2 * h);
  CHECK((r.center.vec() - c.vec()).norm() < 2 * h);
  CHECK(sphere::symmetry_defect_at(moved, Point{0.3, -0.2, 0.1}) > r.defect);
}

TEST_CASE("intrinsic diameter of a small round sphere is pi r") {
  const double r = 0.05;
  const auto oct = mesh::octasphere(20);
  mesh::TriMesh m;
  for (const auto& d : oct.directions) m.vertices.push_back(group_mul(Point{0.2, 0.1, 0.7}, Point::from(r * d)));
  m.faces = oct.faces;
  const auto adj = mesh::build_adjacency(m);
  // Edge paths are longer than geodesics by a few percent.
  CHECK(sphere::intrinsic_diameter(m, adj) == doctest::Approx(std::numbers::pi * r).epsilon(0.06));
  CHECK(sphere::intrinsic_diameter(m, adj) >= std::numbers::pi * r * 0.999);
}

TEST_CASE("hybrid mean curvature is consistent at irregular vertices") {
  // Union-jack triangulation of a cylinder patch: alternating valence 4 and 8.
  const double H = 1.0;
  const int n = 24;
  const double step = 0.6 / n;
  for (double t0 : {0.3, 1.2}) {
    mesh::TriMesh m;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b)
        m.vertices.push_back(cylinder::parametrize(H, t0 + (a - n / 2) * step, (b - n / 2) * step));
    auto id = [&](int a, int b) { return a * (n + 1) + b; };
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if ((a + b) % 2 == 0) {
          m.faces.push_back({id(a, b), id(a + 1, b), id(a + 1, b + 1)});
          m.faces.push_back({id(a, b), id(a + 1, b + 1), id(a, b + 1)});
        } else {
          m.faces.push_back({id(a, b), id(a + 1, b), id(a, b + 1)});
          m.faces.push_back({id(a + 1, b), id(a + 1, b + 1), id(a, b + 1)});
        }
      }
    const auto Hv = sphere::mean_curvature_field(m);
    for (int c : {id(n / 2, n / 2), id(n / 2, n / 2 + 1)}) CHECK(std::abs(Hv[c]) == doctest::Approx(H).epsilon(2e-3));
  }
}

TEST_CASE("continuation reaches new targets") {
  const auto& m = solved(1.0, 1002);
  sphere::SolveOptions o;
  o.resolution = 1002;
  const auto fam = sphere::continue_family(m, {1.3, 1.6}, o);
  REQUIRE(fam.size() == 2);
  for (const auto& f : fam) {
    CHECK(f.converged);
    CHECK(f.sphere.residual <= 1e-2);
  }
  CHECK(fam[1].sphere.target_H == 1.6);
}

TEST_CASE("conjecture regime only warns about the diameter") {
  sphere::SolveOptions o;
  o.resolution = 10002;
  const auto m = sphere::solve(0.55, o);
  const auto r = sphere::geometry_report(m);
  CHECK(r.conjecture_regime);
  CHECK(std::isnan(r.diameterBound));
  CHECK(r.warnings.size() == 1);
  for (const auto& f : r.failures) INFO(f);
  CHECK(r.passed());
}

TEST_CASE("invalid targets and non-CMC surfaces") {
  CHECK_THROWS_AS(sphere::solve(0.0), NumericalError);
  const auto r = sphere::geometry_report(sphere::describe(lumpy(6), 1.0), {.spectrum = false, .symmetry = false});
  CHECK_FALSE(r.passed());
}
