#pragma once

// Gauss map g = (N1 + i N2) / (1 + N3) of surfaces in Sol3, the elliptic
// equation it satisfies on CMC H surfaces,
//
//   g_{z zbar} = A(g) g_z g_zbar + B(g) g_z conj(g)_zbar,
//
// and the representation formula that rebuilds the immersion from g.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sol3/core.hpp"

namespace sol3::gauss {

using cplx = std::complex<double>;

/// A point of the Riemann sphere C u {inf}.
class ExtendedComplex {
 public:
  ExtendedComplex() = default;
  ExtendedComplex(cplx v) : value_(v) {}  // NOLINT: implicit by design of the algebra
  ExtendedComplex(double v) : value_(v, 0.0) {}  // NOLINT
  static ExtendedComplex infinity() {
    ExtendedComplex e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  /// Only meaningful when finite.
  cplx value() const { return value_; }
  double abs() const;

  /// The chart switch q -> i/q (0 <-> inf).
  ExtendedComplex dual() const;

  friend bool operator==(const ExtendedComplex& a, const ExtendedComplex& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  cplx value_{0.0, 0.0};
  bool infinite_ = false;
};

ExtendedComplex dual_value(const ExtendedComplex& q);

// R(q) = H(1+|q|^2)^2 + q^2 - conj(q)^2 and friends; q finite.
cplx R(cplx q, double H);
cplx coeff_A(cplx q, double H);
cplx coeff_B(cplx q, double H);
cplx coeff_M(cplx q, double H);

struct Coefficients {
  cplx R;
  cplx A;
  cplx B;
  cplx M;
};

/// At q = inf only M is defined (M(inf) = 0); R, A, B are returned as NaN.
/// Throws DivisionByZero when R(q) = 0, which needs H = 0.
Coefficients coefficients(const ExtendedComplex& q, double H);

// ---------------------------------------------------------------------------
// Fields

enum class Chart { Direct, Dual };

/// One sample of a Gauss map. In the Dual chart the stored value is w = i/g
/// and the derivatives are those of w. Normalized samples have |value| <= 1.
struct GaussSample {
  Chart chart = Chart::Direct;
  cplx value;
  cplx dz;     // derivative of the stored value with respect to z
  cplx dzbar;  // derivative of the stored value with respect to conj(z)

  ExtendedComplex g() const;
  /// conj(value)_z = conj(value_zbar)
  cplx conj_dz() const { return std::conj(dzbar); }
};

/// Builds a normalized sample from g and its derivatives (g may be infinite
/// only through the dual-chart constructor below).
GaussSample make_sample(cplx g, cplx g_z, cplx g_zbar);
GaussSample make_dual_sample(cplx w, cplx w_z, cplx w_zbar);
GaussSample normalized(const GaussSample& s);
/// Re-expresses a sample in the requested chart (value must be nonzero to switch).
GaussSample in_chart(const GaussSample& s, Chart chart);

struct GridSpec {
  int nu = 0;
  int nv = 0;
  double u0 = 0.0;
  double v0 = 0.0;
  double du = 1.0;
  double dv = 1.0;

  int index(int i, int j) const { return i * nv + j; }
  double u(int i) const { return u0 + i * du; }
  double v(int j) const { return v0 + j * dv; }
  int size() const { return nu * nv; }
};

/// Discretized Gauss map. Structured fields carry a grid (sample index
/// i*nv + j at (u0 + i du, v0 + j dv)); scattered fields, e.g. sampled from a
/// triangulated sphere, have no grid and carry their own parameter points.
struct GaussField {
  double H = 0.0;
  std::optional<GridSpec> grid;
  std::vector<GaussSample> samples;
  std::vector<std::array<double, 2>> points;  // (u, v) per sample when grid is empty

  bool admissible(double eps = 0.0) const;  // |g_z| > eps everywhere
};

GaussField dual_field(const GaussField& f);

/// z -> 1/conj(g(conj z)), H -> -H. Needs a v-grid symmetric about v = 0.
GaussField orientation_reversed(const GaussField& f);

/// Residual over a grid; boundary samples are absent.
struct ResidualGrid {
  GridSpec grid;
  std::vector<cplx> values;
  std::vector<char> present;

  double max_abs() const;
};

/// Centered Laplacian stencil: 3-point (second order) or 5-point (fourth
/// order) per axis. Fourth order needs two samples of margin.
enum class Stencil { Second, Fourth };

/// g_{z zbar} - A g_z g_zbar - B g_z conj(g)_zbar at interior samples. The
/// mixed derivative is the centered Laplacian / 4; first derivatives are the
/// stored ones. Evaluated in each sample's own chart.
ResidualGrid pde_residual(const GaussField& f, Stencil stencil = Stencil::Second);
/// Residual at one interior grid sample (i, j).
cplx pde_residual_at(const GaussField& f, int i, int j, Stencil stencil = Stencil::Second);
int stencil_margin(Stencil stencil);

// ---------------------------------------------------------------------------
// Pointwise formulas (all in the chart where g is finite)

struct FrameVelocity {
  cplx A1, A2, A3;
  cplx eta;
  double lambda = 0.0;
};

/// X_z in frame components from the Gauss map. Throws Degenerate if g_z = 0.
FrameVelocity frame_velocity(cplx g, cplx g_z, double H);

/// Hopf differential coefficient P.
cplx hopf_P(cplx g, cplx g_z, cplx gbar_z, double H);
/// Same coefficient from a sample in either chart.
cplx hopf_P(const GaussSample& s, double H);

struct MeanCurvatureEstimate {
  double H = 0.0;
  double imag_residual = 0.0;
};
MeanCurvatureEstimate mean_curvature_from_gauss(cplx g, cplx g_z, cplx A3);

/// X_z in coordinate components from a sample and the current x3.
std::array<cplx, 3> coordinate_derivative(const GaussSample& s, double x3, double H);
/// (x3)_z alone (no dependence on x3).
cplx x3_derivative(const GaussSample& s, double H);

// ---------------------------------------------------------------------------

struct SurfacePatch {
  GridSpec grid;
  std::vector<Point> samples;
  std::vector<double> lambda;
  double integrability_residual = 0.0;
};

struct IntegrationOptions {
  /// Max discrete curl (closed-loop defect per unit cell area).
  double tolerance = 1e-2;
  bool throw_on_failure = true;
};

/// Rebuilds the immersion from a grid Gauss field, starting at `seed` on the
/// first sample. Throws IntegrabilityFailure if the loop defect exceeds the
/// tolerance.
SurfacePatch integrate_representation(const GaussField& f, const Point& seed,
                                      const IntegrationOptions& opts = {});

// ---------------------------------------------------------------------------
// Minimal case

/// Q* = g_z conj(g)_z / (g^2 - conj(g)^2). Throws Degenerate when g is real or
/// purely imaginary.
cplx minimal_Qstar(cplx g, cplx g_z, cplx gbar_z);

/// |d Q* / d zbar| per interior sample, from centered differences of Q*.
ResidualGrid minimal_Qstar_holomorphy_residual(const GaussField& f);

// ---------------------------------------------------------------------------
// Serialization: CSV rows (u, v, Re g, Im g, Re g_z, Im g_z, Re g_zbar,
// Im g_zbar) preceded by a "# {json}" header with H, grid metadata and the
// list of rows stored in the dual chart.

void write_field_csv(const GaussField& f, const std::string& path);
GaussField read_field_csv(const std::string& path);

}  // namespace sol3::gauss
