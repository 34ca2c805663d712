#include "sol3/cylinders.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "sol3/errors.hpp"

namespace sol3::cylinder {

namespace {

using std::numbers::pi;

double integrand(double H, double s) { return std::exp(-std::cos(s) / (2.0 * H)) * std::cos(s); }

double integrate(double H, double a, double b) {
  const double width = b - a;
  if (width == 0.0) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(width) / (pi / 16.0))));
  const double h = width / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    sum += boost::math::quadrature::gauss<double, 10>::integrate(
        [H](double s) { return integrand(H, s); }, lo, lo + h);
  }
  return sum;
}

void require_positive(double H) {
  if (!(H > 0.0)) throw NumericalError(ErrorKind::InvalidArgument, "H must be positive");
}

// Right-hand sides in the two charts: g_u, and for gt = 1/g, gt_u.
double rhs_direct(double H, double g) {
  const double n = 1.0 + g * g;
  return n * std::exp(1.0 / (H * n));
}
double rhs_dual(double H, double gt) {
  const double n = 1.0 + gt * gt;
  return -n * std::exp(gt * gt / (H * n));
}

struct State {
  bool dual = false;
  double y = 1.0;  // g, or 1/g in the dual chart
};

double rhs(double H, const State& s, double y) { return s.dual ? rhs_dual(H, y) : rhs_direct(H, y); }

State rk4_step(double H, State s, double h) {
  const double k1 = rhs(H, s, s.y);
  const double k2 = rhs(H, s, s.y + 0.5 * h * k1);
  const double k3 = rhs(H, s, s.y + 0.5 * h * k2);
  const double k4 = rhs(H, s, s.y + h * k3);
  s.y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(s.y)) throw NumericalError(ErrorKind::StepRejected, "cylinder ODE blew up");
  if (std::abs(s.y) > 1.0) {
    s.dual = !s.dual;
    s.y = 1.0 / s.y;
  }
  return s;
}

gauss::GaussSample sample_of(double H, const State& s) {
  constexpr gauss::cplx I{0.0, 1.0};
  if (!s.dual) {
    const double gu = rhs_direct(H, s.y);
    return {gauss::Chart::Direct, {s.y, 0.0}, {0.5 * gu, 0.0}, {0.5 * gu, 0.0}};
  }
  // Stored value w = i/g = i * gt.
  const double gtu = rhs_dual(H, s.y);
  return {gauss::Chart::Dual, I * s.y, I * (0.5 * gtu), I * (0.5 * gtu)};
}

}  // namespace

double x1_of_t(double H, double t) {
  require_positive(H);
  return -integrate(H, 0.0, t) / (2.0 * H);
}

ProfileCurve profile(double H, int n) {
  require_positive(H);
  if (n < 16) throw NumericalError(ErrorKind::InvalidArgument, "profile needs n >= 16");
  ProfileCurve c;
  c.H = H;
  c.samples.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = -pi / 2.0 + 2.0 * pi * k / (n - 1);
    c.samples[k] = {t, x1_of_t(H, t), std::cos(t) / (2.0 * H)};
  }
  c.loop_gap = c.samples.back().x1 - c.samples.front().x1;
  return c;
}

double embedding_defect(double H) {
  require_positive(H);
  return integrate(H, -pi / 2.0, 3.0 * pi / 2.0);
}

Point parametrize(double H, double t, double v) {
  require_positive(H);
  return {x1_of_t(H, t), -std::exp(1.0 / (2.0 * H)) * v / H, std::cos(t) / (2.0 * H)};
}

double period_u(double H) {
  require_positive(H);
  const double a = 1.0 / (2.0 * H);
  return pi * std::exp(-a) * boost::math::cyl_bessel_i(0, a);
}

double u_offset(double H) {
  require_positive(H);
  // du/dt = -1/2 e^{-(1 - cos t)/(2H)}; u-distance from t = 3pi/2 down to pi/2.
  const double a = 1.0 / (2.0 * H);
  return boost::math::quadrature::gauss<double, 20>::integrate(
      [a](double t) { return 0.5 * std::exp(-a * (1.0 - std::cos(t))); }, pi / 2.0, 3.0 * pi / 2.0);
}

gauss::GaussField gauss_of_cylinder(double H, int nu, const CylinderGaussOptions& opts) {
  require_positive(H);
  if (nu < 3) throw NumericalError(ErrorKind::InvalidArgument, "nu must be >= 3");
  if (opts.nv < 1 || opts.substeps < 1)
    throw NumericalError(ErrorKind::InvalidArgument, "bad cylinder grid options");
  const double P = period_u(H);
  const double du = P / (nu - 1);
  gauss::GridSpec gs{nu, opts.nv, -u_offset(H), -0.5 * (opts.nv - 1) * du, du, du};

  // g = cot(t/2) = -1 at t = 3pi/2, the first sample; the solution through
  // it takes the value 1 at u = 0.
  std::vector<State> states(nu);
  states[0] = State{false, -1.0};
  const double h = du / opts.substeps;
  for (int i = 1; i < nu; ++i) {
    State s = states[i - 1];
    for (int k = 0; k < opts.substeps; ++k) s = rk4_step(H, s, h);
    states[i] = s;
  }

  gauss::GaussField f;
  f.H = H;
  f.grid = gs;
  f.samples.resize(gs.size());
  for (int i = 0; i < nu; ++i) {
    const gauss::GaussSample s = sample_of(H, states[i]);
    for (int j = 0; j < gs.nv; ++j) f.samples[gs.index(i, j)] = s;
  }
  return f;
}

std::vector<double> t_values(const gauss::GaussField& f) {
  if (!f.grid) throw NumericalError(ErrorKind::InvalidArgument, "cylinder field needs a grid");
  const gauss::GridSpec& gs = *f.grid;
  std::vector<double> t(gs.nu);
  for (int i = 0; i < gs.nu; ++i) {
    const gauss::GaussSample& s = f.samples[gs.index(i, 0)];
    // g = cot(t/2) in the direct chart, 1/g = tan(t/2) = Im w in the dual one.
    double ti = s.chart == gauss::Chart::Direct ? 2.0 * std::atan2(1.0, s.value.real())
                                                : 2.0 * std::atan(s.value.imag());
    // t decreases along u; unwrap onto the branch starting at 3pi/2.
    const double prev = i == 0 ? 1.5 * pi : t[i - 1];
    while (ti > prev + pi) ti -= 2.0 * pi;
    while (ti < prev - pi) ti += 2.0 * pi;
    t[i] = ti;
  }
  return t;
}

void write_profile_csv(const ProfileCurve& c, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw NumericalError(ErrorKind::Io, "cannot write " + path);
  os << std::setprecision(17);
  os << "# H " << c.H << "\n";
  os << "t,x1,x3\n";
  for (const auto& s : c.samples) os << s.t << ',' << s.x1 << ',' << s.x3 << "\n";
}

}  // namespace sol3::cylinder
