#pragma once

// Checks run on a solved sphere. Everything is measured; `failures` lists the
// asserted properties that did not hold.

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "sol3/jacobi.hpp"
#include "sol3/sphere.hpp"
#include "sol3/surface_fit.hpp"

namespace sol3::sphere {

/// 4H^2 + 4|H| + 2.
double b2_bound(double H);
/// 8 pi / sqrt(3 (3H^2 - 1)); NaN for H <= 1/sqrt(3).
double diameter_bound(double H);
constexpr double kConjectureThreshold = 0.57735026918962576;  // 1/sqrt(3)

struct KillingChecks {
  std::array<double, 3> jacobi_residual{};  // |L f_k| / |f_k|, mass norms
  std::array<double, 3> kernel_defect{};    // part of f_k outside the zero cluster, relative
  std::array<double, 3> stokes_flux{};      // integral of <F_k, N>
  std::array<double, 3> stokes_H_flux{};    // integral of H <F_k, N>
  double area = 0.0;
};

/// f_k = <F_k, N> with the fitted normals. kernel_defect is filled only when
/// the spectrum is given.
KillingChecks killing_checks(const CmcSphereMesh& m, const std::vector<fit::VertexFit>& fits,
                             const JacobiOperator& op, const JacobiSpectrum* spectrum = nullptr);
KillingChecks killing_checks(const CmcSphereMesh& m);

/// Largest distance from a vertex image under the isotropy group of `center`
/// to the nearest vertex, in the metric at the pair's midpoint.
double symmetry_defect_at(const mesh::TriMesh& m, const Point& center);

struct SymmetryResult {
  double defect = 0.0;
  Point center;
};
/// Compass search over left translations starting at `start`.
SymmetryResult symmetry_defect(const mesh::TriMesh& m, const Point& start, double step);

struct EmbeddingResult {
  bool embedded = true;
  int intersecting_pairs = 0;
};
/// Triangle pairs without a shared vertex, bucketed in a uniform spatial hash.
EmbeddingResult check_embedded(const mesh::TriMesh& m);

/// Edge-graph diameter with metric edge lengths (multi-sweep Dijkstra).
double intrinsic_diameter(const mesh::TriMesh& m, const mesh::Adjacency& adj);

struct GaussMapCheck {
  std::vector<fit::GaussJet> jets;
  double min_jacobian = 0.0;  // over vertices away from the poles
  int negative_vertices = 0;
  int negative_faces = 0;
  int zeros = 0;  // strict local minima of |g|
  int poles = 0;  // strict local maxima of |g|
  int x3_minima = 0;
  int x3_maxima = 0;
  double max_hopf_error = 0.0;  // |4|P|^2/lambda^2 - (H^2 - det B)| relative to max(H^2 - det B)
};
GaussMapCheck gauss_map_check(const CmcSphereMesh& m, const mesh::Adjacency& adj,
                              const std::vector<fit::VertexFit>& fits);

struct BigraphCheck {
  bool bigraph = false;
  int positive_components = 0;  // components of {N1 > 0}, fitted normals
  int negative_components = 0;
  int inconsistent_faces = 0;    // faces clear of gamma that do not project monotonically along x1
  double margin = 0.0;           // |N1| below which a vertex counts as near gamma
};
/// Each half {N1 > 0}, {N1 < 0} must be connected and a graph over a leaf
/// x1 = const.
BigraphCheck bigraph_check(const CmcSphereMesh& m, const mesh::Adjacency& adj,
                           const std::vector<fit::VertexFit>& fits);

struct ReportOptions {
  double tol = 1e-2;
  double zero_cluster_C = kDefaultZeroClusterC;
  int eigen_count = 6;
  bool spectrum = true;
  bool symmetry = true;
};

struct VerificationReport {
  double H = 0.0;
  int vertices = 0;
  int euler = 0;
  double h = 0.0;  // mean edge length
  double area = 0.0, volume = 0.0;
  double maxHdev = 0.0;
  double maxHfitDev = 0.0, p99HfitDev = 0.0;
  double B2max = 0.0, B2bound = 0.0;
  double diameter = 0.0, diameterBound = 0.0;  // bound NaN in the conjecture regime
  bool conjecture_regime = false;
  JacobiSpectrum spectrum;
  KillingChecks killing;
  double stokes = 0.0;    // max_k |s_k| / Area
  double stokes_H = 0.0;  // max_k |h_k| / (|H| Area)
  SymmetryResult symmetry;
  EmbeddingResult embedding;
  GaussMapCheck gauss;
  BigraphCheck bigraph;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  bool passed() const { return failures.empty(); }
};

VerificationReport geometry_report(const CmcSphereMesh& m, const ReportOptions& opts = {});

/// Fixed top-level keys {H, maxHdev, B2max, B2bound, diameter, diameterBound,
/// index, zeroCluster, stokes, symmetryDefect, embedded} plus "details".
nlohmann::json report_json(const VerificationReport& r);

}  // namespace sol3::sphere
