#include "sol3/sphere_report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

#include <Eigen/Geometry>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "sol3/errors.hpp"

namespace sol3::sphere {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

double b2_bound(double H) { return 4.0 * H * H + 4.0 * std::abs(H) + 2.0; }

double diameter_bound(double H) {
  if (H <= kConjectureThreshold) return std::numeric_limits<double>::quiet_NaN();
  return 8.0 * M_PI / std::sqrt(3.0 * (3.0 * H * H - 1.0));
}

// ---------------------------------------------------------------------------
// Killing fields

KillingChecks killing_checks(const CmcSphereMesh& m, const std::vector<fit::VertexFit>& fits,
                             const JacobiOperator& op, const JacobiSpectrum* spectrum) {
  const int n = m.mesh.num_vertices();
  KillingChecks out;
  for (double a : m.vertex_area) out.area += a;
  for (int k = 1; k <= 3; ++k) {
    Eigen::VectorXd f(n);
    double s = 0.0, sh = 0.0;
    for (int v = 0; v < n; ++v) {
      const Point& p = m.mesh.vertices[v];
      const FrameVector F = coord_to_frame(p, killing_field(k, p));
      f[v] = F.vec().dot(fits[v].normal.vec());
      s += m.vertex_area[v] * f[v];
      sh += m.vertex_area[v] * m.mean_curvature[v] * f[v];
    }
    out.stokes_flux[k - 1] = s;
    out.stokes_H_flux[k - 1] = sh;
    const double fn = mass_norm(op, f);
    out.jacobi_residual[k - 1] = fn > 0.0 ? mass_norm(op, apply_jacobi(op, f)) / fn : 0.0;
    if (spectrum && fn > 0.0) {
      // Project on the zero-cluster eigenfunctions, which are mass-orthonormal.
      Eigen::VectorXd rest = f;
      for (int i = 0; i < spectrum->eigenvalues.size(); ++i) {
        if (std::abs(spectrum->eigenvalues[i]) > spectrum->zero_tol) continue;
        const Eigen::VectorXd phi = spectrum->eigenfunctions.col(i);
        rest -= (op.mass.array() * phi.array() * f.array()).sum() * phi;
      }
      out.kernel_defect[k - 1] = mass_norm(op, rest) / fn;
    }
  }
  return out;
}

KillingChecks killing_checks(const CmcSphereMesh& m) {
  const auto adj = mesh::build_adjacency(m.mesh);
  const auto fits = fit::fit_surface(m.mesh, adj, m.normals);
  return killing_checks(m, fits, jacobi_operator(m, fits));
}

// ---------------------------------------------------------------------------
// Symmetry

namespace {

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using Tree = bgi::rtree<std::pair<BPoint, int>, bgi::quadratic<16>>;

Tree vertex_tree(const mesh::TriMesh& m) {
  std::vector<std::pair<BPoint, int>> pts;
  pts.reserve(m.vertices.size());
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Point& p = m.vertices[v];
    pts.push_back({BPoint(p.x1, p.x2, p.x3), v});
  }
  return Tree(pts.begin(), pts.end());
}

// Max and RMS distance from the images of every `stride`-th vertex to the mesh.
std::pair<double, double> defect_stats(const mesh::TriMesh& m, const Tree& tree, const Point& center,
                                       int stride) {
  const auto group = isotropy_group(center);
  double worst = 0.0, sum = 0.0;
  int count = 0;
  for (const auto& phi : group) {
    for (int v = 0; v < m.num_vertices(); v += stride) {
      const Point q = phi.apply(m.vertices[v]);
      std::vector<std::pair<BPoint, int>> hit;
      tree.query(bgi::nearest(BPoint(q.x1, q.x2, q.x3), 1), std::back_inserter(hit));
      const double d = mesh::edge_length(q, m.vertices[hit[0].second]);
      worst = std::max(worst, d);
      sum += d * d;
      ++count;
    }
  }
  return {worst, std::sqrt(sum / std::max(count, 1))};
}

}  // namespace

double symmetry_defect_at(const mesh::TriMesh& m, const Point& center) {
  const Tree tree = vertex_tree(m);
  return defect_stats(m, tree, center, 1).first;
}

SymmetryResult symmetry_defect(const mesh::TriMesh& m, const Point& start, double step) {
  const Tree tree = vertex_tree(m);
  const int stride = std::max(1, m.num_vertices() / 1500);
  Point best = start;
  double best_val = defect_stats(m, tree, best, stride).second;
  const double floor = 1e-3 * step;
  while (step > floor) {
    bool moved = false;
    for (int axis = 0; axis < 3 && !moved; ++axis) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::Vector3d c = best.vec();
        c[axis] += sgn * step;
        const double val = defect_stats(m, tree, Point::from(c), stride).second;
        if (val < best_val) {
          best_val = val;
          best = Point::from(c);
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return {defect_stats(m, tree, best, 1).first, best};
}

// ---------------------------------------------------------------------------
// Embeddedness

namespace {

bool segment_hits_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d d = q - p;
  const Eigen::Vector3d e1 = b - a, e2 = c - a;
  const Eigen::Vector3d s = d.cross(e2);
  const double det = e1.dot(s);
  const double scale = e1.norm() * e2.norm() * d.norm();
  if (std::abs(det) <= 1e-14 * scale) return false;  // parallel
  const double inv = 1.0 / det;
  const Eigen::Vector3d t = p - a;
  const double u = t.dot(s) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Eigen::Vector3d r = t.cross(e1);
  const double w = d.dot(r) * inv;
  if (w < 0.0 || u + w > 1.0) return false;
  const double lambda = e2.dot(r) * inv;
  return lambda >= 0.0 && lambda <= 1.0;
}

bool triangles_intersect(const std::array<Eigen::Vector3d, 3>& t1, const std::array<Eigen::Vector3d, 3>& t2) {
  for (int k = 0; k < 3; ++k) {
    if (segment_hits_triangle(t1[k], t1[(k + 1) % 3], t2[0], t2[1], t2[2])) return true;
    if (segment_hits_triangle(t2[k], t2[(k + 1) % 3], t1[0], t1[1], t1[2])) return true;
  }
  return false;
}

}  // namespace

EmbeddingResult check_embedded(const mesh::TriMesh& m) {
  const int nf = m.num_faces();
  std::vector<std::array<Eigen::Vector3d, 3>> tri(nf);
  std::vector<Eigen::Vector3d> lo(nf), hi(nf);
  double cell = 0.0;
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) tri[f][k] = m.vertices[m.faces[f][k]].vec();
    lo[f] = tri[f][0].cwiseMin(tri[f][1]).cwiseMin(tri[f][2]);
    hi[f] = tri[f][0].cwiseMax(tri[f][1]).cwiseMax(tri[f][2]);
    cell = std::max(cell, (hi[f] - lo[f]).maxCoeff());
  }
  EmbeddingResult out;
  if (nf == 0 || cell == 0.0) return out;

  auto key = [](long i, long j, long k) { return (i * 73856093L) ^ (j * 19349663L) ^ (k * 83492791L); };
  std::unordered_map<long, std::vector<int>> buckets;
  for (int f = 0; f < nf; ++f) {
    const Eigen::Vector3d a = (lo[f] / cell).array().floor(), b = (hi[f] / cell).array().floor();
    for (long i = static_cast<long>(a[0]); i <= static_cast<long>(b[0]); ++i)
      for (long j = static_cast<long>(a[1]); j <= static_cast<long>(b[1]); ++j)
        for (long k = static_cast<long>(a[2]); k <= static_cast<long>(b[2]); ++k) buckets[key(i, j, k)].push_back(f);
  }
  std::vector<std::pair<int, int>> hits;
  for (const auto& [_, faces] : buckets) {
    for (size_t x = 0; x < faces.size(); ++x) {
      for (size_t y = x + 1; y < faces.size(); ++y) {
        const int f = faces[x], g = faces[y];
        bool shared = false;
        for (int a : m.faces[f])
          for (int b : m.faces[g]) shared |= a == b;
        if (shared) continue;
        if ((lo[f].array() > hi[g].array()).any() || (lo[g].array() > hi[f].array()).any()) continue;
        if (triangles_intersect(tri[f], tri[g])) hits.push_back({std::min(f, g), std::max(f, g)});
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  out.intersecting_pairs = static_cast<int>(hits.size());
  out.embedded = hits.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Diameter

namespace {

std::vector<double> dijkstra(const mesh::TriMesh& m, const mesh::Adjacency& adj, int source) {
  std::vector<double> dist(m.num_vertices(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (int w : adj.neighbors[v]) {
      const double nd = d + mesh::edge_length(m.vertices[v], m.vertices[w]);
      if (nd < dist[w]) {
        dist[w] = nd;
        pq.push({nd, w});
      }
    }
  }
  return dist;
}

}  // namespace

double intrinsic_diameter(const mesh::TriMesh& m, const mesh::Adjacency& adj) {
  if (m.num_vertices() == 0) return 0.0;
  std::vector<int> starts{0};
  for (int axis = 0; axis < 3; ++axis) {
    int lo = 0, hi = 0;
    for (int v = 0; v < m.num_vertices(); ++v) {
      if (m.vertices[v].vec()[axis] < m.vertices[lo].vec()[axis]) lo = v;
      if (m.vertices[v].vec()[axis] > m.vertices[hi].vec()[axis]) hi = v;
    }
    starts.push_back(lo);
    starts.push_back(hi);
  }
  double best = 0.0;
  for (int s : starts) {
    int v = s;
    for (int sweep = 0; sweep < 3; ++sweep) {
      const auto dist = dijkstra(m, adj, v);
      const auto it = std::max_element(dist.begin(), dist.end());
      if (!std::isfinite(*it)) throw NumericalError(ErrorKind::DegenerateMesh, "mesh is disconnected");
      if (*it <= best && sweep > 0) break;
      best = std::max(best, *it);
      v = static_cast<int>(it - dist.begin());
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Gauss map

namespace {

bool strict_extremum(const mesh::Adjacency& adj, const std::vector<double>& f, int v, bool maximum) {
  for (int w : adj.neighbors[v])
    if (maximum ? f[w] >= f[v] : f[w] <= f[v]) return false;
  return true;
}

}  // namespace

GaussMapCheck gauss_map_check(const CmcSphereMesh& m, const mesh::Adjacency& adj,
                              const std::vector<fit::VertexFit>& fits) {
  const int n = m.mesh.num_vertices();
  GaussMapCheck out;
  out.jets.resize(n);
  int failures = 0;
#pragma omp parallel for schedule(static) reduction(+ : failures)
  for (int v = 0; v < n; ++v) {
    try {
      out.jets[v] = fit::gauss_jet(m.mesh, v, mesh::k_ring(adj, v, 2), fits[v].frame, m.gauss);
    } catch (const NumericalError&) {
      ++failures;
    }
  }
  if (failures > 0) throw NumericalError(ErrorKind::Degenerate, "gauss jet failed at some vertices");

  std::vector<double> absg(n), x3(n);
  for (int v = 0; v < n; ++v) {
    absg[v] = m.gauss[v].is_infinite() ? std::numeric_limits<double>::max() : m.gauss[v].abs();
    x3[v] = m.mesh.vertices[v].x3;
  }
  out.min_jacobian = std::numeric_limits<double>::infinity();
  double hopf_scale = 0.0;
  std::vector<double> hopf_err(n, 0.0);
  for (int v = 0; v < n; ++v) {
    const double jac = out.jets[v].jacobian;
    out.min_jacobian = std::min(out.min_jacobian, jac);
    if (jac <= 0.0) ++out.negative_vertices;
    if (strict_extremum(adj, absg, v, false)) ++out.zeros;
    if (strict_extremum(adj, absg, v, true)) ++out.poles;
    if (strict_extremum(adj, x3, v, false)) ++out.x3_minima;
    if (strict_extremum(adj, x3, v, true)) ++out.x3_maxima;

    const double hh = fits[v].mean * fits[v].mean - fits[v].gauss_ext;
    hopf_scale = std::max(hopf_scale, hh);
    // P and lambda have the same form in both charts.
    const auto& s = out.jets[v].sample;
    const double H = fits[v].mean;
    const double lambda = gauss::frame_velocity(s.value, s.dz, H).lambda;
    hopf_err[v] = std::abs(4.0 * std::norm(gauss::hopf_P(s, H)) / (lambda * lambda) - hh);
  }
  if (hopf_scale > 0.0)
    for (double e : hopf_err) out.max_hopf_error = std::max(out.max_hopf_error, e / hopf_scale);

  // Faces are outward counterclockwise while the jets use the inward normal,
  // so an orientation-preserving map reverses the image triangle.
  for (const auto& f : m.mesh.faces) {
    double biggest = 0.0;
    for (int v : f) biggest = std::max(biggest, absg[v]);
    const bool dual = biggest > 1.0;
    gauss::cplx q[3];
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
      const auto e = dual ? m.gauss[f[k]].dual() : m.gauss[f[k]];
      if (e.is_infinite()) ok = false;
      else q[k] = e.value();
    }
    if (!ok) continue;
    const gauss::cplx a = q[1] - q[0], b = q[2] - q[0];
    const double cross = a.real() * b.imag() - a.imag() * b.real();
    if (cross >= 0.0) ++out.negative_faces;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bigraph

BigraphCheck bigraph_check(const CmcSphereMesh& m, const mesh::Adjacency& adj,
                           const std::vector<fit::VertexFit>& fits) {
  const int n = m.mesh.num_vertices();
  std::vector<int> side(n);
  double b2 = 0.0;
  for (int v = 0; v < n; ++v) {
    side[v] = fits[v].normal.c1 > 0.0 ? 1 : (fits[v].normal.c1 < 0.0 ? -1 : 0);
    b2 = std::max(b2, fits[v].norm_b2);
  }

  BigraphCheck out;
  std::vector<char> seen(n, 0);
  for (int v = 0; v < n; ++v) {
    if (seen[v] || side[v] == 0) continue;
    (side[v] > 0 ? out.positive_components : out.negative_components)++;
    std::vector<int> stack{v};
    seen[v] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : adj.neighbors[u]) {
        if (seen[w] || side[w] != side[v]) continue;
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  // Away from gamma (|N1| above what the normal turns across one edge) every
  // face must project along x1 with the orientation of its half. Inward
  // N1 > 0 means an outward coordinate face normal with negative x1 part.
  out.margin = std::sqrt(b2) * mesh::mean_edge_length(m.mesh, adj);
  for (const auto& f : m.mesh.faces) {
    const int s = side[f[0]];
    bool clear = s != 0;
    for (int v : f) clear = clear && side[v] == s && std::abs(fits[v].normal.c1) > out.margin;
    if (!clear) continue;
    const Eigen::Vector3d p0 = m.mesh.vertices[f[0]].vec();
    const Eigen::Vector3d nrm = (m.mesh.vertices[f[1]].vec() - p0).cross(m.mesh.vertices[f[2]].vec() - p0);
    if (nrm[0] * s >= 0.0) ++out.inconsistent_faces;
  }
  out.bigraph = out.positive_components == 1 && out.negative_components == 1 && out.inconsistent_faces == 0;
  return out;
}

// ---------------------------------------------------------------------------

VerificationReport geometry_report(const CmcSphereMesh& m, const ReportOptions& opts) {
  VerificationReport r;
  r.H = m.target_H;
  r.vertices = m.mesh.num_vertices();
  r.area = m.area;
  r.volume = m.volume;
  const auto adj = mesh::build_adjacency(m.mesh);
  try {
    r.euler = mesh::euler_characteristic(m.mesh);
  } catch (const NumericalError&) {
    r.euler = 0;
  }
  if (r.euler != 2) r.failures.push_back("euler characteristic is not 2");
  r.h = mesh::mean_edge_length(m.mesh, adj);

  for (double hv : m.mean_curvature) r.maxHdev = std::max(r.maxHdev, std::abs(hv - m.target_H));
  if (!(r.maxHdev <= opts.tol)) r.failures.push_back("maxHdev above tolerance");

  const auto fits = fit::fit_surface(m.mesh, adj, m.normals);
  std::vector<double> dev;
  dev.reserve(fits.size());
  for (const auto& f : fits) {
    dev.push_back(std::abs(f.mean - m.target_H));
    r.B2max = std::max(r.B2max, f.norm_b2);
  }
  std::sort(dev.begin(), dev.end());
  r.maxHfitDev = dev.back();
  r.p99HfitDev = dev[static_cast<size_t>(0.99 * (dev.size() - 1))];
  r.B2bound = b2_bound(m.target_H);
  if (!(r.B2max < r.B2bound)) r.failures.push_back("second fundamental form bound violated");

  r.conjecture_regime = m.target_H <= kConjectureThreshold;
  r.diameter = intrinsic_diameter(m.mesh, adj);
  r.diameterBound = diameter_bound(m.target_H);
  if (r.conjecture_regime)
    r.warnings.push_back("conjecture regime H <= 1/sqrt(3): diameter bound not asserted");
  else if (!(r.diameter <= r.diameterBound))
    r.failures.push_back("intrinsic diameter bound violated");

  r.gauss = gauss_map_check(m, adj, fits);
  if (r.gauss.negative_vertices > 0) r.failures.push_back("gauss map jacobian not positive at every vertex");
  if (r.gauss.zeros != 1 || r.gauss.poles != 1) r.failures.push_back("gauss map must have one zero and one pole");
  if (r.gauss.x3_minima != 1 || r.gauss.x3_maxima != 1) r.failures.push_back("x3 must have exactly two critical vertices");

  r.embedding = check_embedded(m.mesh);
  if (!r.embedding.embedded) r.failures.push_back("self-intersections found");
  r.bigraph = bigraph_check(m, adj, fits);
  if (!r.bigraph.bigraph) r.failures.push_back("not a bigraph along N1 = 0");

  if (opts.symmetry) {
    // Start between the two Gauss-map poles.
    int lo = 0, hi = 0;
    for (int v = 0; v < r.vertices; ++v) {
      const double a = m.gauss[v].is_infinite() ? std::numeric_limits<double>::max() : m.gauss[v].abs();
      const double alo = m.gauss[lo].is_infinite() ? std::numeric_limits<double>::max() : m.gauss[lo].abs();
      const double ahi = m.gauss[hi].is_infinite() ? std::numeric_limits<double>::max() : m.gauss[hi].abs();
      if (a < alo) lo = v;
      if (a > ahi) hi = v;
    }
    const Point start = Point::from(0.5 * (m.mesh.vertices[lo].vec() + m.mesh.vertices[hi].vec()));
    r.symmetry = symmetry_defect(m.mesh, start, r.h);
    if (!(r.symmetry.defect <= 2.0 * r.h)) r.failures.push_back("symmetry defect above two edge lengths");
  }

  const JacobiOperator op = jacobi_operator(m, fits);
  if (opts.spectrum) {
    r.spectrum = jacobi_spectrum(op, opts.eigen_count, opts.zero_cluster_C);
    if (r.spectrum.index != 1) r.failures.push_back("index is not one");
    if (r.spectrum.zero_cluster != 3) r.failures.push_back("zero cluster is not three-dimensional");
  }
  r.killing = killing_checks(m, fits, op, opts.spectrum ? &r.spectrum : nullptr);
  for (int k = 0; k < 3; ++k) {
    r.stokes = std::max(r.stokes, std::abs(r.killing.stokes_flux[k]) / r.killing.area);
    r.stokes_H = std::max(r.stokes_H, std::abs(r.killing.stokes_H_flux[k]) /
                                          (std::abs(m.target_H) * r.killing.area));
  }
  if (!(r.stokes <= 1e-3)) r.failures.push_back("flux of a Killing field does not vanish");
  if (!(r.stokes_H <= 1e-3)) r.failures.push_back("H-weighted flux of a Killing field does not vanish");
  return r;
}

nlohmann::json report_json(const VerificationReport& r) {
  using nlohmann::json;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  auto arr = [&](const std::array<double, 3>& a) { return json::array({num(a[0]), num(a[1]), num(a[2])}); };
  json j;
  j["H"] = r.H;
  j["maxHdev"] = num(r.maxHdev);
  j["B2max"] = num(r.B2max);
  j["B2bound"] = num(r.B2bound);
  j["diameter"] = num(r.diameter);
  j["diameterBound"] = num(r.diameterBound);
  j["index"] = r.spectrum.converged ? json(r.spectrum.index) : json(nullptr);
  j["zeroCluster"] = r.spectrum.converged ? json(r.spectrum.zero_cluster) : json(nullptr);
  j["stokes"] = num(r.stokes);
  j["symmetryDefect"] = num(r.symmetry.defect);
  j["embedded"] = r.embedding.embedded;

  json d;
  d["vertices"] = r.vertices;
  d["euler"] = r.euler;
  d["meanEdge"] = num(r.h);
  d["area"] = num(r.area);
  d["volume"] = num(r.volume);
  d["maxHfitDev"] = num(r.maxHfitDev);
  d["p99HfitDev"] = num(r.p99HfitDev);
  d["conjectureRegime"] = r.conjecture_regime;
  std::vector<double> eig(r.spectrum.eigenvalues.data(), r.spectrum.eigenvalues.data() + r.spectrum.eigenvalues.size());
  d["eigenvalues"] = eig;
  d["zeroTolerance"] = num(r.spectrum.zero_tol);
  d["killingResidual"] = arr(r.killing.jacobi_residual);
  d["killingKernelDefect"] = arr(r.killing.kernel_defect);
  d["stokesFlux"] = arr(r.killing.stokes_flux);
  d["stokesHFlux"] = arr(r.killing.stokes_H_flux);
  d["stokesH"] = num(r.stokes_H);
  d["center"] = {r.symmetry.center.x1, r.symmetry.center.x2, r.symmetry.center.x3};
  d["intersectingPairs"] = r.embedding.intersecting_pairs;
  d["gaussMinJacobian"] = num(r.gauss.min_jacobian);
  d["gaussNegativeVertices"] = r.gauss.negative_vertices;
  d["gaussNegativeFaces"] = r.gauss.negative_faces;
  d["gaussZeros"] = r.gauss.zeros;
  d["gaussPoles"] = r.gauss.poles;
  d["x3Minima"] = r.gauss.x3_minima;
  d["x3Maxima"] = r.gauss.x3_maxima;
  d["hopfError"] = num(r.gauss.max_hopf_error);
  d["bigraph"] = r.bigraph.bigraph;
  d["bigraphComponents"] = {r.bigraph.positive_components, r.bigraph.negative_components};
  d["bigraphInconsistentFaces"] = r.bigraph.inconsistent_faces;
  d["failures"] = r.failures;
  d["warnings"] = r.warnings;
  j["details"] = d;
  return j;
}

}  // namespace sol3::sphere
