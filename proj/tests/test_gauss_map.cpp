#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "sol3/cylinders.hpp"
#include "sol3/errors.hpp"
#include "sol3/gauss_map.hpp"
#include "sol3/kernels.hpp"

using namespace sol3;
using gauss::cplx;

namespace {

cplx random_cplx(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng)};
}

const cplx I{0.0, 1.0};

}  // namespace

TEST_CASE("R transforms by |w|^-4 under the chart switch") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const cplx w = random_cplx(rng);
    const double H = 0.2 + std::abs(random_cplx(rng).real());
    const cplx g = I / w;
    CHECK(std::abs(gauss::R(g, H) - gauss::R(w, H) / std::pow(std::abs(w), 4)) <
          1e-10 * std::abs(gauss::R(g, H)));
  }
}

TEST_CASE("coefficients at infinity and at R = 0") {
  const auto c = gauss::coefficients(gauss::ExtendedComplex::infinity(), 1.0);
  CHECK(c.M == cplx(0.0, 0.0));
  CHECK(std::isnan(c.A.real()));
  CHECK(gauss::coefficients(cplx(0.0, 0.0), 2.0).M == cplx(0.5, 0.0));
  // H = 0 and real q gives R = 0.
  CHECK_THROWS_AS(gauss::coefficients(cplx(0.7, 0.0), 0.0), NumericalError);
}

TEST_CASE("extended complex chart switch") {
  CHECK(gauss::ExtendedComplex(cplx(0.0, 0.0)).dual().is_infinite());
  CHECK(gauss::ExtendedComplex::infinity().dual() == gauss::ExtendedComplex(cplx(0.0, 0.0)));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const cplx q = random_cplx(rng);
    const auto back = gauss::ExtendedComplex(q).dual().dual();
    CHECK(std::abs(back.value() - q) < 1e-12 * std::max(1.0, std::abs(q)));
  }
}

TEST_CASE("samples: normalization and chart round trip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const cplx g = random_cplx(rng, 2.0), gz = random_cplx(rng), gzb = random_cplx(rng);
    const auto s = gauss::make_sample(g, gz, gzb);
    CHECK(std::abs(s.value) <= 1.0);
    CHECK(s.chart == (std::abs(g) <= 1.0 ? gauss::Chart::Direct : gauss::Chart::Dual));
    const auto d = gauss::in_chart(s, gauss::Chart::Direct);
    CHECK(std::abs(d.value - g) < 1e-12 * std::max(1.0, std::abs(g)));
    CHECK(std::abs(d.dz - gz) < 1e-10 * std::max(1.0, std::abs(gz)));
    CHECK(std::abs(d.dzbar - gzb) < 1e-10 * std::max(1.0, std::abs(gzb)));
  }
}

TEST_CASE("Hopf coefficient and conformal factor agree across charts") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const cplx g = random_cplx(rng), gz = random_cplx(rng), gzb = random_cplx(rng);
    const double H = 0.5 + 0.5 * trial / 100.0;
    const gauss::GaussSample direct{gauss::Chart::Direct, g, gz, gzb};
    const auto dual = gauss::in_chart(direct, gauss::Chart::Dual);
    const cplx p = gauss::hopf_P(g, gz, std::conj(gzb), H);
    CHECK(std::abs(gauss::hopf_P(direct, H) - p) < 1e-12 * std::max(1.0, std::abs(p)));
    CHECK(std::abs(gauss::hopf_P(dual, H) - p) < 1e-9 * std::max(1.0, std::abs(p)));
    const double ld = gauss::frame_velocity(direct.value, direct.dz, H).lambda;
    const double lw = gauss::frame_velocity(dual.value, dual.dz, H).lambda;
    CHECK(lw == doctest::Approx(ld).epsilon(1e-9));
  }
}

TEST_CASE("frame velocity is degenerate when g_z = 0") {
  CHECK_THROWS_AS(gauss::frame_velocity(cplx(0.3, 0.1), cplx(0.0, 0.0), 1.0), NumericalError);
}

TEST_CASE("cylinder Gauss field solves the equation; so does its orientation reversal") {
  const auto f = cylinder::gauss_of_cylinder(1.0, 257);
  CHECK(f.admissible(1e-8));
  const double r = gauss::pde_residual(f).max_abs();
  CHECK(r < 3e-3);
  const auto rev = gauss::orientation_reversed(f);
  CHECK(rev.H == -1.0);
  CHECK(gauss::pde_residual(rev).max_abs() < 3e-3);
  CHECK(gauss::pde_residual(f, gauss::Stencil::Fourth).max_abs() < 1e-5);
}

TEST_CASE("residual kernels: serial and parallel agree") {
  const auto f = cylinder::gauss_of_cylinder(0.7, 129, {.nv = 9});
  for (auto st : {gauss::Stencil::Second, gauss::Stencil::Fourth}) {
    gauss::ResidualGrid a, b;
    kernels::serial::pde_residual(f, a, st);
    kernels::parallel::pde_residual(f, b, st);
    REQUIRE(a.values.size() == b.values.size());
    CHECK(a.present == b.present);
    for (size_t k = 0; k < a.values.size(); ++k)
      if (a.present[k]) CHECK(std::abs(a.values[k] - b.values[k]) <= 1e-14 * (1.0 + std::abs(a.values[k])));
  }
}

TEST_CASE("field CSV round trip") {
  const auto f = cylinder::gauss_of_cylinder(1.3, 65);
  const auto path = (std::filesystem::temp_directory_path() / "sol3_field_roundtrip.csv").string();
  gauss::write_field_csv(f, path);
  const auto g = gauss::read_field_csv(path);
  std::remove(path.c_str());
  CHECK(g.H == f.H);
  REQUIRE(g.grid);
  CHECK(g.grid->nu == f.grid->nu);
  CHECK(g.grid->nv == f.grid->nv);
  REQUIRE(g.samples.size() == f.samples.size());
  for (size_t k = 0; k < f.samples.size(); ++k) {
    CHECK(g.samples[k].chart == f.samples[k].chart);
    CHECK(g.samples[k].value == f.samples[k].value);
    CHECK(g.samples[k].dz == f.samples[k].dz);
    CHECK(g.samples[k].dzbar == f.samples[k].dzbar);
  }
}

TEST_CASE("reading a malformed field fails") {
  const auto path = (std::filesystem::temp_directory_path() / "sol3_field_bad.csv").string();
  {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    std::fputs("not a field\n1,2,3\n", fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(gauss::read_field_csv(path), NumericalError);
  std::remove(path.c_str());
}

TEST_CASE("minimal Q* formula") {
  const cplx g(0.4, 0.3), gz(1.0, -0.5), gbz(0.2, 0.1);
  const cplx expect = gz * gbz / (g * g - std::conj(g) * std::conj(g));
  CHECK(std::abs(gauss::minimal_Qstar(g, gz, gbz) - expect) < 1e-14);
  CHECK_THROWS_AS(gauss::minimal_Qstar(cplx(0.5, 0.0), gz, gbz), NumericalError);
  CHECK_THROWS_AS(gauss::minimal_Qstar(cplx(0.0, 0.5), gz, gbz), NumericalError);
}

TEST_CASE("perturbed field is not integrable") {
  auto f = cylinder::gauss_of_cylinder(1.0, 129);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 0.05);
  for (auto& s : f.samples) s.dz += cplx(n(rng), n(rng));
  gauss::IntegrationOptions opts;
  CHECK_THROWS_AS(gauss::integrate_representation(f, Point{}, opts), NumericalError);
  opts.throw_on_failure = false;
  CHECK(gauss::integrate_representation(f, Point{}, opts).integrability_residual > opts.tolerance);
}
