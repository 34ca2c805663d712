// Serial reference kernels against their OpenMP versions.

#include <map>

#include <benchmark/benchmark.h>

#include "sol3/cylinders.hpp"
#include "sol3/kernels.hpp"
#include "sol3/mesh.hpp"
#include "sol3/sphere.hpp"

using namespace sol3;

namespace {

struct Fixture {
  mesh::TriMesh mesh;
  mesh::Adjacency adj;
};

// Radial graph over the octasphere with frequency n (4n^2 + 2 vertices).
const Fixture& sphere_mesh(int n) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    Fixture f;
    const auto oct = mesh::octasphere(n);
    for (const auto& d : oct.directions) f.mesh.vertices.push_back(sphere::graph_point(0.9 + 0.1 * d[0] * d[1], d));
    f.mesh.faces = oct.faces;
    f.adj = mesh::build_adjacency(f.mesh);
    it = cache.emplace(n, std::move(f)).first;
  }
  return it->second;
}

const gauss::GaussField& cylinder_field(int nu) {
  static std::map<int, gauss::GaussField> cache;
  auto it = cache.find(nu);
  if (it == cache.end()) it = cache.emplace(nu, cylinder::gauss_of_cylinder(1.0, nu)).first;
  return it->second;
}

void BM_area_volume_serial(benchmark::State& st) {
  const auto& f = sphere_mesh(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::area_volume(f.mesh));
  st.counters["vertices"] = static_cast<double>(f.mesh.num_vertices());
}

void BM_area_volume_parallel(benchmark::State& st) {
  const auto& f = sphere_mesh(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::area_volume(f.mesh, f.adj));
  st.counters["vertices"] = static_cast<double>(f.mesh.num_vertices());
}

void BM_mean_curvature_serial(benchmark::State& st) {
  const auto& f = sphere_mesh(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::mean_curvature(f.mesh));
}

void BM_mean_curvature_parallel(benchmark::State& st) {
  const auto& f = sphere_mesh(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::mean_curvature(f.mesh, f.adj));
}

void BM_pde_residual_serial(benchmark::State& st) {
  const auto& f = cylinder_field(static_cast<int>(st.range(0)));
  gauss::ResidualGrid out;
  for (auto _ : st) {
    kernels::serial::pde_residual(f, out);
    benchmark::DoNotOptimize(out);
  }
}

void BM_pde_residual_parallel(benchmark::State& st) {
  const auto& f = cylinder_field(static_cast<int>(st.range(0)));
  gauss::ResidualGrid out;
  for (auto _ : st) {
    kernels::parallel::pde_residual(f, out);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(BM_area_volume_serial)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_area_volume_parallel)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mean_curvature_serial)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mean_curvature_parallel)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pde_residual_serial)->Arg(257)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pde_residual_parallel)->Arg(257)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
