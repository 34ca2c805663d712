#include "sol3/core.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "sol3/errors.hpp"

namespace sol3 {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionByZero: return "division by zero";
    case ErrorKind::Degenerate: return "degenerate input";
    case ErrorKind::StepRejected: return "step rejected";
    case ErrorKind::IntegrabilityFailure: return "integrability failure";
    case ErrorKind::NotConverged: return "not converged";
    case ErrorKind::DegenerateMesh: return "degenerate mesh";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::OutOfSupport: return "out of support";
    case ErrorKind::Io: return "i/o";
  }
  return "error";
}

bool Point::finite() const {
  return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3);
}

Point group_mul(const Point& a, const Point& b) {
  return {a.x1 + std::exp(-a.x3) * b.x1, a.x2 + std::exp(a.x3) * b.x2, a.x3 + b.x3};
}

Point group_inverse(const Point& p) {
  return {-std::exp(p.x3) * p.x1, -std::exp(-p.x3) * p.x2, -p.x3};
}

Eigen::Vector3d left_translation_differential(const Point& a) {
  return {std::exp(-a.x3), std::exp(a.x3), 1.0};
}

Eigen::Vector3d metric_diagonal(const Point& p) {
  return {std::exp(2.0 * p.x3), std::exp(-2.0 * p.x3), 1.0};
}

Eigen::Vector3d inverse_metric_diagonal(const Point& p) {
  return {std::exp(-2.0 * p.x3), std::exp(2.0 * p.x3), 1.0};
}

double metric_eval(const Point& p, const CoordVector& u, const CoordVector& v) {
  const Eigen::Vector3d g = metric_diagonal(p);
  return g[0] * u[0] * v[0] + g[1] * u[1] * v[1] + g[2] * u[2] * v[2];
}

Eigen::Vector3d frame_convert(const Point& p, const Eigen::Vector3d& vec, FrameDirection direction) {
  const double s = std::exp(p.x3);
  if (direction == FrameDirection::CoordToFrame) return {s * vec[0], vec[1] / s, vec[2]};
  return {vec[0] / s, s * vec[1], vec[2]};
}

FrameVector coord_to_frame(const Point& p, const CoordVector& v) {
  return FrameVector::from(frame_convert(p, v, FrameDirection::CoordToFrame));
}

CoordVector frame_to_coord(const Point& p, const FrameVector& v) {
  return frame_convert(p, v.vec(), FrameDirection::FrameToCoord);
}

namespace {

// table[i][j] = nabla_{E_{i+1}} E_{j+1}
constexpr double kConnection[3][3][3] = {
    {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
    {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
    {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}},
};

Eigen::Vector3d nabla(int i, const Eigen::Vector3d& coeffs) {
  // nabla_{E_i} of a constant-coefficient combination of frame fields
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m) out[m] += coeffs[l] * kConnection[i][l][m];
  return out;
}

Eigen::Vector3d frame_field(int i) { return Eigen::Vector3d::Unit(i); }

Eigen::Vector3d riemann(int i, int j, int k) {
  const Eigen::Vector3d djk = nabla(j, frame_field(k));
  const Eigen::Vector3d dik = nabla(i, frame_field(k));
  const Eigen::Vector3d bracket = nabla(i, frame_field(j)) - nabla(j, frame_field(i));
  Eigen::Vector3d d_bracket = Eigen::Vector3d::Zero();
  for (int l = 0; l < 3; ++l) d_bracket += bracket[l] * nabla(l, frame_field(k));
  return nabla(i, djk) - nabla(j, dik) - d_bracket;
}

}  // namespace

FrameVector connection(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3)
    throw NumericalError(ErrorKind::InvalidArgument, "frame index out of range");
  const auto& c = kConnection[i - 1][j - 1];
  return {c[0], c[1], c[2]};
}

CurvatureInvariants curvature_invariants(const Point& /*p*/) {
  CurvatureInvariants out;
  auto sectional = [](int a, int b) { return riemann(a, b, b)[a]; };
  out.sectional_12 = sectional(0, 1);
  out.sectional_13 = sectional(0, 2);
  out.sectional_23 = sectional(1, 2);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double r = 0.0;
      for (int i = 0; i < 3; ++i) r += riemann(i, j, k)[i];
      out.ricci(j, k) = r;
    }
  for (int i = 0; i < 3; ++i) out.ricci_diag[i] = out.ricci(i, i);
  out.scalar = out.ricci.trace();
  return out;
}

double ricci_of_unit(const FrameVector& n) { return -2.0 * n.c3 * n.c3; }

std::array<Eigen::Matrix3d, 3> coordinate_christoffel(const Point& p) {
  std::array<Eigen::Matrix3d, 3> gamma;
  for (auto& m : gamma) m.setZero();
  gamma[0](0, 2) = gamma[0](2, 0) = 1.0;
  gamma[1](1, 2) = gamma[1](2, 1) = -1.0;
  gamma[2](0, 0) = -std::exp(2.0 * p.x3);
  gamma[2](1, 1) = std::exp(-2.0 * p.x3);
  return gamma;
}

CoordVector killing_field(int k, const Point& p) {
  switch (k) {
    case 1: return {1.0, 0.0, 0.0};
    case 2: return {0.0, 1.0, 0.0};
    case 3: return {-p.x1, p.x2, 1.0};
    default: throw NumericalError(ErrorKind::InvalidArgument, "Killing field index must be 1, 2 or 3");
  }
}

// ---------------------------------------------------------------------------
// Isometries

Isometry Isometry::sigma() { return Isometry({Sigma{}}); }
Isometry Isometry::tau() { return Isometry({Tau{}}); }
Isometry Isometry::translation(const Point& a) { return Isometry({LeftTranslation{a}}); }

Isometry Isometry::operator*(const Isometry& rhs) const {
  std::vector<IsometryGenerator> w = word_;
  w.insert(w.end(), rhs.word_.begin(), rhs.word_.end());
  return Isometry(std::move(w));
}

Isometry Isometry::inverse() const {
  std::vector<IsometryGenerator> w;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
    if (auto* t = std::get_if<LeftTranslation>(&*it)) {
      w.push_back(LeftTranslation{group_inverse(t->by)});
    } else if (std::holds_alternative<Sigma>(*it)) {
      w.insert(w.end(), 3, Sigma{});
    } else {
      w.push_back(Tau{});
    }
  }
  return Isometry(std::move(w));
}

Isometry Isometry::power(int n) const {
  Isometry out;
  const Isometry base = n >= 0 ? *this : inverse();
  for (int i = 0; i < std::abs(n); ++i) out = out * base;
  return out;
}

namespace {

Point apply_generator(const IsometryGenerator& g, const Point& p) {
  if (auto* t = std::get_if<LeftTranslation>(&g)) return group_mul(t->by, p);
  if (std::holds_alternative<Sigma>(g)) return {p.x2, -p.x1, -p.x3};
  return {-p.x1, p.x2, p.x3};
}

CoordVector push_generator(const IsometryGenerator& g, const CoordVector& v) {
  if (auto* t = std::get_if<LeftTranslation>(&g))
    return left_translation_differential(t->by).cwiseProduct(v);
  if (std::holds_alternative<Sigma>(g)) return {v[1], -v[0], -v[2]};
  return {-v[0], v[1], v[2]};
}

}  // namespace

Point Isometry::apply(const Point& p) const {
  Point q = p;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) q = apply_generator(*it, q);
  return q;
}

CoordVector Isometry::push_forward(const Point& p, const CoordVector& v) const {
  Point q = p;
  CoordVector w = v;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
    w = push_generator(*it, w);
    q = apply_generator(*it, q);
  }
  return w;
}

std::vector<Isometry> isotropy_group(const Point& center) {
  const Isometry to = Isometry::translation(center);
  const Isometry from = Isometry::translation(group_inverse(center));
  std::vector<Isometry> out;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 2; ++j)
      out.push_back(to * Isometry::sigma().power(k) * Isometry::tau().power(j) * from);
  return out;
}

// ---------------------------------------------------------------------------
// Geodesics

namespace {

struct State {
  Eigen::Vector3d x;
  Eigen::Vector3d v;  // frame components
};

State geodesic_rhs(const State& s) {
  const Point p = Point::from(s.x);
  State d;
  d.x = frame_convert(p, s.v, FrameDirection::FrameToCoord);
  d.v.setZero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) d.v[k] -= s.v[i] * s.v[j] * kConnection[i][j][k];
  return d;
}

}  // namespace

GeodesicState geodesic_flow(const Point& p, const FrameVector& v, double t, double dt, double speed_tol) {
  if (!(dt > 0.0) || t < 0.0)
    throw NumericalError(ErrorKind::InvalidArgument, "geodesic_flow needs dt > 0 and t >= 0");
  const int steps = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-12)));
  const double h = t / steps;
  State s{p.vec(), v.vec()};
  const double speed0 = s.v.norm();
  for (int n = 0; n < steps && t > 0.0; ++n) {
    const State k1 = geodesic_rhs(s);
    const State k2 = geodesic_rhs({s.x + 0.5 * h * k1.x, s.v + 0.5 * h * k1.v});
    const State k3 = geodesic_rhs({s.x + 0.5 * h * k2.x, s.v + 0.5 * h * k2.v});
    const State k4 = geodesic_rhs({s.x + h * k3.x, s.v + h * k3.v});
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    if (speed0 > 0.0 && std::abs(s.v.norm() - speed0) > speed_tol * speed0)
      throw NumericalError(ErrorKind::StepRejected, "speed drift exceeds tolerance; reduce dt");
  }
  return {Point::from(s.x), FrameVector::from(s.v)};
}

// ---------------------------------------------------------------------------

SurfaceCurvature surface_curvature(const SurfaceJet& jet) {
  const Point& p = jet.x;
  const auto gamma = coordinate_christoffel(p);
  auto covariant = [&](const CoordVector& second, const CoordVector& a, const CoordVector& b) {
    CoordVector out = second;
    for (int k = 0; k < 3; ++k) out[k] += a.dot(gamma[k] * b);
    return out;
  };
  auto to_frame = [&](const CoordVector& v) {
    return frame_convert(p, v, FrameDirection::CoordToFrame);
  };
  const Eigen::Vector3d fs = to_frame(jet.xs);
  const Eigen::Vector3d ft = to_frame(jet.xt);
  const Eigen::Vector3d cross = fs.cross(ft);
  const double cn = cross.norm();
  if (!(cn > 0.0)) throw NumericalError(ErrorKind::Degenerate, "surface jet is not immersed");
  const Eigen::Vector3d n = cross / cn;

  Eigen::Matrix2d first;
  first << fs.dot(fs), fs.dot(ft), fs.dot(ft), ft.dot(ft);
  Eigen::Matrix2d second;
  second(0, 0) = to_frame(covariant(jet.xss, jet.xs, jet.xs)).dot(n);
  second(0, 1) = second(1, 0) = to_frame(covariant(jet.xst, jet.xs, jet.xt)).dot(n);
  second(1, 1) = to_frame(covariant(jet.xtt, jet.xt, jet.xt)).dot(n);

  const Eigen::Matrix2d shape = first.inverse() * second;
  SurfaceCurvature out;
  out.mean = 0.5 * shape.trace();
  out.gauss_ext = shape.determinant();
  out.norm_b2 = (shape * shape).trace();
  out.normal = FrameVector::from(n);
  return out;
}

}  // namespace sol3
