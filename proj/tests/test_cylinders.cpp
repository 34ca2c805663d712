#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "sol3/cylinders.hpp"
#include "sol3/gauss_map.hpp"

using namespace sol3;
using std::numbers::pi;

namespace {

double defect_oracle(double H) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([H](double t) { return std::exp(-std::cos(t) / (2 * H)) * std::cos(t); }, -pi / 2,
                      3 * pi / 2);
}

SurfaceJet jet_by_differences(double H, double t, double v, double h = 1e-4) {
  auto X = [H](double a, double b) { return cylinder::parametrize(H, a, b).vec(); };
  SurfaceJet j;
  j.x = cylinder::parametrize(H, t, v);
  j.xs = (X(t + h, v) - X(t - h, v)) / (2 * h);
  j.xt = (X(t, v + h) - X(t, v - h)) / (2 * h);
  j.xss = (X(t + h, v) - 2 * j.x.vec() + X(t - h, v)) / (h * h);
  j.xtt = (X(t, v + h) - 2 * j.x.vec() + X(t, v - h)) / (h * h);
  j.xst = (X(t + h, v + h) - X(t + h, v - h) - X(t - h, v + h) + X(t - h, v - h)) / (4 * h * h);
  return j;
}

}  // namespace

TEST_CASE("embedding defect matches quadrature and the Bessel closed form") {
  for (double H : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double d = cylinder::embedding_defect(H);
    CHECK(d < 0.0);
    CHECK(std::abs(d - defect_oracle(H)) < 1e-10);
    CHECK(std::abs(d + 2 * pi * std::cyl_bessel_i(1.0, 1.0 / (2 * H))) < 1e-10);
  }
  CHECK(cylinder::embedding_defect(0.5) == doctest::Approx(-3.5509993).epsilon(1e-7));
}

TEST_CASE("embedding defect approaches -pi/(2H)") {
  const double d = cylinder::embedding_defect(10.0), a = -pi / 20.0;
  CHECK(std::abs(d - a) / std::abs(a) < 5e-4);
  CHECK(std::abs(cylinder::embedding_defect(100.0) + pi / 200.0) < std::abs(d - a));
}

TEST_CASE("profile: x3 = cos t/(2H) and x1 from quadrature") {
  const double H = 0.8;
  const auto c = cylinder::profile(H, 257);
  REQUIRE(c.samples.size() == 257);
  CHECK(c.samples.front().t == doctest::Approx(-pi / 2));
  CHECK(c.samples.back().t == doctest::Approx(3 * pi / 2));
  double lo = 1e9, hi = -1e9;
  for (const auto& s : c.samples) {
    CHECK(s.x3 == doctest::Approx(std::cos(s.t) / (2 * H)));
    lo = std::min(lo, s.x3);
    hi = std::max(hi, s.x3);
  }
  CHECK(lo == doctest::Approx(-1 / (2 * H)).epsilon(1e-6));
  CHECK(hi == doctest::Approx(1 / (2 * H)).epsilon(1e-6));
  for (size_t k = 0; k < c.samples.size(); k += 32) {
    const double t = c.samples[k].t;
    const double oracle = -1 / (2 * H) *
                          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                              [H](double s) { return std::exp(-std::cos(s) / (2 * H)) * std::cos(s); }, 0.0, t, 10,
                              1e-14);
    CHECK(std::abs(c.samples[k].x1 - oracle) < 1e-12);
  }
  CHECK(c.loop_gap == doctest::Approx(-cylinder::embedding_defect(H) / (2 * H)).epsilon(1e-10));
}

TEST_CASE("parametrized cylinder has constant mean curvature H") {
  for (double H : {0.4, 1.0, 2.5}) {
    for (double t : {-1.2, 0.0, 0.7, 2.0, 4.1}) {
      const auto c = surface_curvature(jet_by_differences(H, t, 0.3));
      CHECK(std::abs(c.mean) == doctest::Approx(H).epsilon(1e-5));
    }
  }
}

TEST_CASE("period in u matches its closed form") {
  for (double H : {0.5, 1.0, 3.0}) {
    const double a = 1 / (2 * H);
    CHECK(cylinder::period_u(H) == doctest::Approx(pi * std::exp(-a) * std::cyl_bessel_i(0.0, a)).epsilon(1e-12));
  }
}

TEST_CASE("pde residual converges at second order and the fourth-order stencil reaches 1e-4") {
  double prev = 0.0;
  for (int nu : {129, 257, 513}) {
    const double r = gauss::pde_residual(cylinder::gauss_of_cylinder(1.0, nu)).max_abs();
    if (prev > 0) CHECK(prev / r >= 3.5);
    prev = r;
  }
  CHECK(gauss::pde_residual(cylinder::gauss_of_cylinder(1.0, 129), gauss::Stencil::Fourth).max_abs() <= 1e-4);
}

TEST_CASE("representation formula rebuilds the cylinder") {
  const double H = 1.0;
  const auto f = cylinder::gauss_of_cylinder(H, 513);
  const auto t = cylinder::t_values(f);
  const auto patch = gauss::integrate_representation(f, cylinder::parametrize(H, t[0], f.grid->v(0)));
  double dev = 0.0;
  for (int i = 0; i < f.grid->nu; ++i)
    for (int j = 0; j < f.grid->nv; ++j) {
      const Point q = cylinder::parametrize(H, t[i], f.grid->v(j));
      dev = std::max(dev, (q.vec() - patch.samples[f.grid->index(i, j)].vec()).cwiseAbs().maxCoeff());
    }
  CHECK(dev <= 1e-5);
  CHECK(patch.integrability_residual < 1e-5);
}
