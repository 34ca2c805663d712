#include "sol3/gauss_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sol3/errors.hpp"
#include "sol3/kernels.hpp"

namespace sol3::gauss {

namespace {

constexpr cplx kI{0.0, 1.0};

double sq(double x) { return x * x; }

cplx convert_value(cplx a) { return kI / a; }

}  // namespace

double ExtendedComplex::abs() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : std::abs(value_);
}

ExtendedComplex ExtendedComplex::dual() const {
  if (infinite_) return ExtendedComplex(cplx{0.0, 0.0});
  if (value_ == cplx{0.0, 0.0}) return infinity();
  return ExtendedComplex(kI / value_);
}

ExtendedComplex dual_value(const ExtendedComplex& q) { return q.dual(); }

cplx R(cplx q, double H) {
  const double n = 1.0 + std::norm(q);
  return H * n * n + q * q - std::conj(q) * std::conj(q);
}

cplx coeff_A(cplx q, double H) {
  const double n = 1.0 + std::norm(q);
  return (2.0 * H * n * std::conj(q) + 2.0 * q) / R(q, H);
}

cplx coeff_B(cplx q, double H) {
  const double n = 1.0 + std::norm(q);
  return -4.0 * H * n * (std::conj(q) + q * q * q) / std::norm(R(q, H));
}

cplx coeff_M(cplx q, double H) { return 1.0 / R(q, H); }

Coefficients coefficients(const ExtendedComplex& q, double H) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (q.is_infinite()) return {cplx{nan, nan}, cplx{nan, nan}, cplx{nan, nan}, cplx{0.0, 0.0}};
  const cplx r = R(q.value(), H);
  if (r == cplx{0.0, 0.0}) throw NumericalError(ErrorKind::DivisionByZero, "R(q) = 0");
  return {r, coeff_A(q.value(), H), coeff_B(q.value(), H), 1.0 / r};
}

// ---------------------------------------------------------------------------

ExtendedComplex GaussSample::g() const {
  if (chart == Chart::Direct) return ExtendedComplex(value);
  return ExtendedComplex(value).dual();
}

GaussSample make_sample(cplx g, cplx g_z, cplx g_zbar) {
  return normalized({Chart::Direct, g, g_z, g_zbar});
}

GaussSample make_dual_sample(cplx w, cplx w_z, cplx w_zbar) {
  return normalized({Chart::Dual, w, w_z, w_zbar});
}

GaussSample in_chart(const GaussSample& s, Chart chart) {
  if (s.chart == chart) return s;
  if (s.value == cplx{0.0, 0.0})
    throw NumericalError(ErrorKind::DivisionByZero, "chart switch at a zero value");
  // b = i/a: b_z = -i a_z / a^2, same for zbar.
  const cplx factor = -kI / (s.value * s.value);
  return {chart, convert_value(s.value), factor * s.dz, factor * s.dzbar};
}

GaussSample normalized(const GaussSample& s) {
  if (std::abs(s.value) <= 1.0) return s;
  return in_chart(s, s.chart == Chart::Direct ? Chart::Dual : Chart::Direct);
}

bool GaussField::admissible(double eps) const {
  return std::all_of(samples.begin(), samples.end(),
                     [eps](const GaussSample& s) { return std::abs(s.dz) > eps; });
}

GaussField dual_field(const GaussField& f) {
  // Relabeling the chart is exact: a value a stored as g becomes w = a for
  // the dual map i/g, and the stored derivatives are already those of a.
  GaussField out = f;
  for (auto& s : out.samples) s.chart = s.chart == Chart::Direct ? Chart::Dual : Chart::Direct;
  return out;
}

GaussField orientation_reversed(const GaussField& f) {
  if (!f.grid) throw NumericalError(ErrorKind::InvalidArgument, "orientation reversal needs a grid");
  const GridSpec& gs = *f.grid;
  const double v_last = gs.v(gs.nv - 1);
  if (std::abs(gs.v0 + v_last) > 1e-9 * std::max(1.0, std::abs(v_last)))
    throw NumericalError(ErrorKind::InvalidArgument, "v-grid must be symmetric about 0");
  GaussField out;
  out.H = -f.H;
  out.grid = gs;
  out.samples.resize(f.samples.size());
  // In either chart the new stored quantity is i * conj(old stored quantity)
  // at the reflected point, in the other chart.
  for (int i = 0; i < gs.nu; ++i) {
    for (int j = 0; j < gs.nv; ++j) {
      const GaussSample& s = f.samples[gs.index(i, gs.nv - 1 - j)];
      GaussSample t;
      t.chart = s.chart == Chart::Direct ? Chart::Dual : Chart::Direct;
      t.value = kI * std::conj(s.value);
      t.dz = kI * std::conj(s.dz);
      t.dzbar = kI * std::conj(s.dzbar);
      out.samples[gs.index(i, j)] = t;
    }
  }
  return out;
}

double ResidualGrid::max_abs() const {
  double m = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (present[k]) m = std::max(m, std::abs(values[k]));
  return m;
}

int stencil_margin(Stencil stencil) { return stencil == Stencil::Second ? 1 : 2; }

cplx pde_residual_at(const GaussField& f, int i, int j, Stencil stencil) {
  const GridSpec& gs = *f.grid;
  const GaussSample& c = f.samples[gs.index(i, j)];
  auto at = [&](int a, int b) {
    const GaussSample& s = f.samples[gs.index(a, b)];
    return s.chart == c.chart ? s.value : convert_value(s.value);
  };
  cplx duu, dvv;
  if (stencil == Stencil::Second) {
    duu = (at(i + 1, j) + at(i - 1, j) - 2.0 * c.value) / sq(gs.du);
    dvv = (at(i, j + 1) + at(i, j - 1) - 2.0 * c.value) / sq(gs.dv);
  } else {
    duu = (-at(i + 2, j) + 16.0 * at(i + 1, j) - 30.0 * c.value + 16.0 * at(i - 1, j) - at(i - 2, j)) /
          (12.0 * sq(gs.du));
    dvv = (-at(i, j + 2) + 16.0 * at(i, j + 1) - 30.0 * c.value + 16.0 * at(i, j - 1) - at(i, j - 2)) /
          (12.0 * sq(gs.dv));
  }
  const cplx g_zzbar = 0.25 * (duu + dvv);
  return g_zzbar - coeff_A(c.value, f.H) * c.dz * c.dzbar -
         coeff_B(c.value, f.H) * c.dz * c.conj_dz();
}

ResidualGrid pde_residual(const GaussField& f, Stencil stencil) {
  if (!f.grid) throw NumericalError(ErrorKind::InvalidArgument, "pde_residual needs a grid field");
  ResidualGrid out;
  kernels::parallel::pde_residual(f, out, stencil);
  return out;
}

// ---------------------------------------------------------------------------

FrameVelocity frame_velocity(cplx g, cplx g_z, double H) {
  if (g_z == cplx{0.0, 0.0})
    throw NumericalError(ErrorKind::Degenerate, "g_z = 0 (antiholomorphic point)");
  const cplx r = R(g, H);
  if (r == cplx{0.0, 0.0}) throw NumericalError(ErrorKind::DivisionByZero, "R(g) = 0");
  const cplx gb = std::conj(g);
  FrameVelocity fv;
  fv.eta = 4.0 * gb * g_z / r;
  // The eta/(4 conj g) factor is written out so the formulas stay finite at g = 0.
  fv.A1 = -(1.0 - gb * gb) * g_z / r;
  fv.A2 = kI * (1.0 + gb * gb) * g_z / r;
  fv.A3 = 0.5 * fv.eta;
  fv.lambda = 4.0 * sq(1.0 + std::norm(g)) * std::norm(g_z) / std::norm(r);
  return fv;
}

cplx hopf_P(cplx g, cplx g_z, cplx gbar_z, double H) {
  const cplx r = R(g, H);
  if (r == cplx{0.0, 0.0}) throw NumericalError(ErrorKind::DivisionByZero, "R(g) = 0");
  const cplx gb = std::conj(g);
  return 2.0 * g_z * gbar_z / r - 2.0 * (1.0 - gb * gb * gb * gb) * g_z * g_z / (r * r);
}

cplx hopf_P(const GaussSample& s, double H) {
  if (s.chart == Chart::Direct) return hopf_P(s.value, s.dz, s.conj_dz(), H);
  // Substituting g = i/w, R(g) = R(w)/|w|^4.
  const cplx r = R(s.value, H);
  if (r == cplx{0.0, 0.0}) throw NumericalError(ErrorKind::DivisionByZero, "R(w) = 0");
  const cplx wb = std::conj(s.value);
  return 2.0 * s.dz * s.conj_dz() / r + 2.0 * (wb * wb * wb * wb - 1.0) * s.dz * s.dz / (r * r);
}

MeanCurvatureEstimate mean_curvature_from_gauss(cplx g, cplx g_z, cplx A3) {
  if (A3 == cplx{0.0, 0.0}) throw NumericalError(ErrorKind::Degenerate, "A3 = 0");
  const double n2 = sq(1.0 + std::norm(g));
  const cplx gb = std::conj(g);
  const cplx h = 2.0 * gb * g_z / (n2 * A3) - (g * g - gb * gb) / n2;
  return {h.real(), h.imag()};
}

cplx x3_derivative(const GaussSample& s, double H) {
  const cplx r = R(s.value, H);
  const cplx vb = std::conj(s.value);
  if (s.chart == Chart::Direct) return 2.0 * vb * s.dz / r;
  return -2.0 * vb * s.dz / r;
}

std::array<cplx, 3> coordinate_derivative(const GaussSample& s, double x3, double H) {
  const cplx r = R(s.value, H);
  const cplx vb = std::conj(s.value);
  const double em = std::exp(-x3);
  const double ep = std::exp(x3);
  if (s.chart == Chart::Direct) {
    return {em * (vb * vb - 1.0) * s.dz / r, kI * ep * (vb * vb + 1.0) * s.dz / r,
            2.0 * vb * s.dz / r};
  }
  return {kI * em * (vb * vb + 1.0) * s.dz / r, ep * (vb * vb - 1.0) * s.dz / r,
          -2.0 * vb * s.dz / r};
}

// ---------------------------------------------------------------------------

namespace {

// Cumulative trapezoid along a line of derivative samples with the
// Euler-Maclaurin end correction, which lifts the rule to fourth order.
void cumulative_line(const std::vector<double>& f, double h, std::vector<double>& out) {
  const std::size_t m = f.size();
  out.assign(m, 0.0);
  std::vector<double> df(m, 0.0);
  if (m >= 3) {
    for (std::size_t k = 1; k + 1 < m; ++k) df[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    df[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
  }
  double acc = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    acc += 0.5 * h * (f[k - 1] + f[k]);
    out[k] = acc - h * h / 12.0 * (df[k] - df[0]);
  }
}

// Integrates one real coordinate given its complex z-derivative per node:
// x_u = 2 Re F, x_v = -2 Im F. Path: along u on the first row, then along v.
std::vector<double> integrate_component(const GridSpec& gs, const std::vector<cplx>& F,
                                        double start) {
  std::vector<double> x(gs.size(), start);
  std::vector<double> line, acc;
  line.resize(gs.nu);
  for (int i = 0; i < gs.nu; ++i) line[i] = 2.0 * F[gs.index(i, 0)].real();
  cumulative_line(line, gs.du, acc);
  std::vector<double> base(gs.nu);
  for (int i = 0; i < gs.nu; ++i) base[i] = start + acc[i];
  line.resize(gs.nv);
  for (int i = 0; i < gs.nu; ++i) {
    for (int j = 0; j < gs.nv; ++j) line[j] = -2.0 * F[gs.index(i, j)].imag();
    cumulative_line(line, gs.dv, acc);
    for (int j = 0; j < gs.nv; ++j) x[gs.index(i, j)] = base[i] + acc[j];
  }
  return x;
}

double loop_defect(const GridSpec& gs, const std::vector<cplx>& F) {
  double worst = 0.0;
  for (int i = 0; i + 1 < gs.nu; ++i) {
    for (int j = 0; j + 1 < gs.nv; ++j) {
      auto fu = [&](int a, int b) { return 2.0 * F[gs.index(a, b)].real(); };
      auto fv = [&](int a, int b) { return -2.0 * F[gs.index(a, b)].imag(); };
      const double loop = 0.5 * gs.du * (fu(i, j) + fu(i + 1, j)) +
                          0.5 * gs.dv * (fv(i + 1, j) + fv(i + 1, j + 1)) -
                          0.5 * gs.du * (fu(i, j + 1) + fu(i + 1, j + 1)) -
                          0.5 * gs.dv * (fv(i, j) + fv(i, j + 1));
      worst = std::max(worst, std::abs(loop) / (gs.du * gs.dv));
    }
  }
  return worst;
}

}  // namespace

SurfacePatch integrate_representation(const GaussField& f, const Point& seed,
                                      const IntegrationOptions& opts) {
  if (!f.grid) throw NumericalError(ErrorKind::InvalidArgument, "integration needs a grid field");
  if (f.H == 0.0) throw NumericalError(ErrorKind::InvalidArgument, "H must be nonzero");
  if (!f.admissible()) throw NumericalError(ErrorKind::Degenerate, "field has g_z = 0");
  const GridSpec& gs = *f.grid;
  const int n = gs.size();

  std::vector<cplx> F3(n);
  for (int k = 0; k < n; ++k) F3[k] = x3_derivative(f.samples[k], f.H);
  const std::vector<double> x3 = integrate_component(gs, F3, seed.x3);

  std::vector<cplx> F1(n), F2(n);
  SurfacePatch patch;
  patch.grid = gs;
  patch.lambda.resize(n);
  for (int k = 0; k < n; ++k) {
    const auto d = coordinate_derivative(f.samples[k], x3[k], f.H);
    F1[k] = d[0];
    F2[k] = d[1];
    patch.lambda[k] = frame_velocity(f.samples[k].value, f.samples[k].dz, f.H).lambda;
  }
  const std::vector<double> x1 = integrate_component(gs, F1, seed.x1);
  const std::vector<double> x2 = integrate_component(gs, F2, seed.x2);

  patch.samples.resize(n);
  for (int k = 0; k < n; ++k) patch.samples[k] = {x1[k], x2[k], x3[k]};
  patch.integrability_residual =
      std::max({loop_defect(gs, F1), loop_defect(gs, F2), loop_defect(gs, F3)});
  if (opts.throw_on_failure && patch.integrability_residual > opts.tolerance)
    throw NumericalError(ErrorKind::IntegrabilityFailure,
                         "loop defect " + std::to_string(patch.integrability_residual) +
                             " exceeds tolerance");
  return patch;
}

// ---------------------------------------------------------------------------

cplx minimal_Qstar(cplx g, cplx g_z, cplx gbar_z) {
  const cplx rs = g * g - std::conj(g) * std::conj(g);
  if (std::abs(rs) <= 1e-14 * std::max(1.0, std::norm(g)))
    throw NumericalError(ErrorKind::Degenerate, "Q* undefined: g real or purely imaginary");
  return g_z * gbar_z / rs;
}

ResidualGrid minimal_Qstar_holomorphy_residual(const GaussField& f) {
  if (!f.grid) throw NumericalError(ErrorKind::InvalidArgument, "holomorphy check needs a grid");
  const GridSpec& gs = *f.grid;
  std::vector<cplx> q(gs.size());
  std::vector<char> ok(gs.size(), 0);
  for (int k = 0; k < gs.size(); ++k) {
    // Q* is chart independent: with w = i/g, w_z conj(w)_z / (w^2 - conj(w)^2)
    // equals the same expression in g.
    const GaussSample& s = f.samples[k];
    try {
      q[k] = minimal_Qstar(s.value, s.dz, s.conj_dz());
      ok[k] = 1;
    } catch (const NumericalError&) {
    }
  }
  ResidualGrid out;
  out.grid = gs;
  out.values.assign(gs.size(), cplx{0.0, 0.0});
  out.present.assign(gs.size(), 0);
  for (int i = 1; i + 1 < gs.nu; ++i) {
    for (int j = 1; j + 1 < gs.nv; ++j) {
      const int a = gs.index(i + 1, j), b = gs.index(i - 1, j);
      const int c = gs.index(i, j + 1), d = gs.index(i, j - 1);
      if (!(ok[a] && ok[b] && ok[c] && ok[d])) continue;
      const cplx qu = (q[a] - q[b]) / (2.0 * gs.du);
      const cplx qv = (q[c] - q[d]) / (2.0 * gs.dv);
      out.values[gs.index(i, j)] = 0.5 * (qu + kI * qv);
      out.present[gs.index(i, j)] = 1;
    }
  }
  return out;
}

}  // namespace sol3::gauss
