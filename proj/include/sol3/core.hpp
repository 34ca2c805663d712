#pragma once

// Closed-form geometry of Sol3: R^3 with metric e^{2x3}dx1^2 + e^{-2x3}dx2^2 + dx3^2
// and group law (a1,a2,a3)(b1,b2,b3) = (a1 + e^{-a3}b1, a2 + e^{a3}b2, a3 + b3).

#include <array>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace sol3 {

/// Components along the coordinate fields d/dx1, d/dx2, d/dx3.
using CoordVector = Eigen::Vector3d;

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  Eigen::Vector3d vec() const { return {x1, x2, x3}; }
  static Point from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
  bool finite() const;
};

/// Components along the left-invariant orthonormal frame
/// E1 = e^{-x3} d/dx1, E2 = e^{x3} d/dx2, E3 = d/dx3.
struct FrameVector {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  Eigen::Vector3d vec() const { return {c1, c2, c3}; }
  static FrameVector from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
  double squared_norm() const { return c1 * c1 + c2 * c2 + c3 * c3; }
};

Point group_mul(const Point& a, const Point& b);
Point group_inverse(const Point& p);

/// Coordinate differential of left translation by a (diagonal).
Eigen::Vector3d left_translation_differential(const Point& a);

/// Diagonal of the metric tensor at p, and of its inverse.
Eigen::Vector3d metric_diagonal(const Point& p);
Eigen::Vector3d inverse_metric_diagonal(const Point& p);

double metric_eval(const Point& p, const CoordVector& u, const CoordVector& v);

enum class FrameDirection { CoordToFrame, FrameToCoord };

Eigen::Vector3d frame_convert(const Point& p, const Eigen::Vector3d& vec, FrameDirection direction);
FrameVector coord_to_frame(const Point& p, const CoordVector& v);
CoordVector frame_to_coord(const Point& p, const FrameVector& v);

/// Levi-Civita connection nabla_{E_i} E_j for i, j in {1, 2, 3}.
FrameVector connection(int i, int j);

struct CurvatureInvariants {
  double sectional_12 = 0.0;
  double sectional_13 = 0.0;
  double sectional_23 = 0.0;
  std::array<double, 3> ricci_diag{};
  Eigen::Matrix3d ricci = Eigen::Matrix3d::Zero();
  double scalar = 0.0;
};

/// Derived from the connection table with R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z.
/// The frame is left-invariant, so the result does not depend on p.
CurvatureInvariants curvature_invariants(const Point& p);

/// Ric(N, N) for a unit normal given in frame components.
double ricci_of_unit(const FrameVector& n);

/// Coordinate Christoffel symbols; gamma[k](i, j) = Gamma^k_{ij}.
std::array<Eigen::Matrix3d, 3> coordinate_christoffel(const Point& p);

/// Killing fields F1 = d1, F2 = d2, F3 = -x1 d1 + x2 d2 + d3 (k in {1,2,3}).
CoordVector killing_field(int k, const Point& p);

// Isometries are kept as words over generators since they are not linear in
// model coordinates once left translations are involved.
struct LeftTranslation {
  Point by;
};
struct Sigma {};
struct Tau {};
using IsometryGenerator = std::variant<LeftTranslation, Sigma, Tau>;

class Isometry {
 public:
  Isometry() = default;
  static Isometry identity() { return {}; }
  static Isometry sigma();
  static Isometry tau();
  static Isometry translation(const Point& a);

  /// (f * g)(p) = f(g(p)).
  Isometry operator*(const Isometry& rhs) const;
  Isometry inverse() const;
  Isometry power(int n) const;

  Point apply(const Point& p) const;
  /// Coordinate differential at p applied to v.
  CoordVector push_forward(const Point& p, const CoordVector& v) const;

  const std::vector<IsometryGenerator>& word() const { return word_; }

 private:
  explicit Isometry(std::vector<IsometryGenerator> word) : word_(std::move(word)) {}
  std::vector<IsometryGenerator> word_;  // leftmost generator acts last
};

/// The eight isometries fixing `center` (the D4 isotropy group conjugated by
/// the left translation taking the origin to center).
std::vector<Isometry> isotropy_group(const Point& center);

struct GeodesicState {
  Point position;
  FrameVector velocity;
};

/// Integrates the geodesic equation with classical RK4 at fixed step dt.
/// Throws NumericalError if the relative speed drift exceeds speed_tol.
GeodesicState geodesic_flow(const Point& p, const FrameVector& v, double t, double dt,
                            double speed_tol = 1e-6);

/// Second-order jet of a parametrized surface X(s, t) in model coordinates.
struct SurfaceJet {
  Point x;
  CoordVector xs, xt, xss, xst, xtt;
};

struct SurfaceCurvature {
  double mean = 0.0;     // with respect to `normal`
  double gauss_ext = 0.0;  // determinant of the shape operator
  double norm_b2 = 0.0;    // squared norm of the second fundamental form
  FrameVector normal;      // xs x xt, normalized, frame components
};

SurfaceCurvature surface_curvature(const SurfaceJet& jet);

}  // namespace sol3
