// sol3cmc: solves and checks CMC surfaces in Sol3 from the command line.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 a check failed or the
// numerics gave up (reports are still written when possible).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sol3/cylinders.hpp"
#include "sol3/errors.hpp"
#include "sol3/gauss_map.hpp"
#include "sol3/mesh.hpp"
#include "sol3/minimal_graphs.hpp"
#include "sol3/quad_diff.hpp"
#include "sol3/sphere.hpp"
#include "sol3/sphere_report.hpp"

using namespace sol3;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCheckFailed = 2;

// Relative paths go under $SOL3CMC_OUT_DIR when it is set.
std::string out_path(const std::string& p) {
  if (p.empty()) return p;
  const char* dir = std::getenv("SOL3CMC_OUT_DIR");
  std::filesystem::path path(p);
  if (dir == nullptr || *dir == '\0' || path.is_absolute()) return p;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / path).string();
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericalError(ErrorKind::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) std::cout << j.dump(2) << '\n';
  else write_json(j, out_path(path));
}

int numerical_failure(const NumericalError& e) {
  json j = {{"error", to_string(e.kind())}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
  return e.kind() == ErrorKind::Io || e.kind() == ErrorKind::InvalidArgument ? kUsage : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct ProfileArgs {
  double H = 1.0;
  int n = 512;
  std::string out;
};

int run_profile(const ProfileArgs& a) {
  const auto c = cylinder::profile(a.H, a.n);
  if (a.out.empty()) {
    std::cout << "t,x1,x3\n";
    for (const auto& s : c.samples) std::cout << s.t << ',' << s.x1 << ',' << s.x3 << '\n';
  } else {
    cylinder::write_profile_csv(c, out_path(a.out));
  }
  return kOk;
}

struct CylinderArgs {
  double H = 1.0;
  int nu = 256;
  std::string out;
  std::string summary;
};

int run_cylinder(const CylinderArgs& a) {
  const auto f = cylinder::gauss_of_cylinder(a.H, a.nu);
  if (!a.out.empty()) gauss::write_field_csv(f, out_path(a.out));
  const auto c = cylinder::profile(a.H, 64);
  json j = {{"H", a.H},
            {"embeddingDefect", cylinder::embedding_defect(a.H)},
            {"loopGap", c.loop_gap},
            {"periodU", cylinder::period_u(a.H)},
            {"pdeResidual", gauss::pde_residual(f, gauss::Stencil::Fourth).max_abs()}};
  emit(j, a.summary);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SphereArgs {
  double H = 1.0;
  int resolution = 10002;
  double tol = 1e-2;
  std::string obj;
  std::string report;
  bool quad = true;
  bool quiet = false;
};

// Appends the quadratic-differential checks for a solved sphere.
void add_quad_report(const sphere::CmcSphereMesh& m, json& j, std::vector<std::string>& failures) {
  json q;
  try {
    std::vector<double> jac;
    const auto field = quad::sphere_gauss_field(m, &jac);
    const auto table = quad::build_L(field, jac);
    const auto v = quad::verify_L(table);
    const auto own = quad::Q_eval(field, table);
    const auto cyl_field = cylinder::gauss_of_cylinder(m.target_H, 200);
    const auto cyl = quad::Q_eval(cyl_field, table, 10.0 * own.vanish_rel_max);
    q = {{"ratioMax", v.ratio_max},
         {"eqLResidual", v.eqL_residual},
         {"decayMax", v.decay_max},
         {"decayMedian", v.decay_median},
         {"vanishMax", own.vanish_max},
         {"vanishRelMax", own.vanish_rel_max},
         {"cylinderVanishRelMax", cyl.vanish_rel_max},
         {"cylinderCrRatioMax", cyl.cr_ratio_max}};
    if (!(v.ratio_max < 1.0)) failures.push_back("|L/M| reaches 1");
    if (!(v.decay_max <= 2.0 * v.decay_median)) failures.push_back("q^4 L not bounded near infinity");
    if (!(cyl.vanish_rel_max >= 100.0 * own.vanish_rel_max))
      failures.push_back("Q does not separate the sphere from the cylinder");
  } catch (const NumericalError& e) {
    q = {{"error", e.what()}};
    failures.push_back(std::string("quadratic differential: ") + e.what());
  }
  j["quadDiff"] = q;
}

json checked_report(const sphere::CmcSphereMesh& m, double tol, bool with_quad, bool* passed) {
  sphere::ReportOptions opts;
  opts.tol = tol;
  const auto r = sphere::geometry_report(m, opts);
  json j = sphere::report_json(r);
  std::vector<std::string> failures = r.failures;
  if (with_quad) add_quad_report(m, j, failures);
  j["details"]["failures"] = failures;
  j["passed"] = failures.empty();
  *passed = failures.empty();
  return j;
}

void warn_conjecture(double H) {
  if (H <= sphere::kConjectureThreshold)
    std::cerr << "warning: H <= 1/sqrt(3) is the conjecture regime; the diameter bound is advisory\n";
}

int run_sphere(const SphereArgs& a) {
  warn_conjecture(a.H);
  sphere::SolveOptions opts;
  opts.resolution = a.resolution;
  opts.tol = a.tol;
  if (!a.quiet) opts.log = [](const std::string& s) { std::cerr << s << '\n'; };
  const auto m = sphere::solve(a.H, opts);
  if (!a.obj.empty()) mesh::write_obj(out_path(a.obj), m.mesh, m.target_H, &m.normals);
  bool passed = false;
  const json j = checked_report(m, a.tol, a.quad, &passed);
  emit(j, a.report);
  if (!passed)
    for (const auto& f : j["details"]["failures"]) std::cerr << "check failed: " << f.get<std::string>() << '\n';
  return passed ? kOk : kCheckFailed;
}

struct FamilyArgs {
  std::vector<double> H{0.6, 0.7, 0.8, 1.0, 1.5, 2.0};
  int resolution = 10002;
  double tol = 1e-2;
  std::string report;
  std::string obj_prefix;
};

int run_family(const FamilyArgs& a) {
  for (double H : a.H) warn_conjecture(H);
  sphere::SolveOptions opts;
  opts.resolution = a.resolution;
  opts.tol = a.tol;
  const auto first = sphere::solve(a.H.front(), opts);
  const std::vector<double> rest(a.H.begin() + 1, a.H.end());
  auto members = sphere::continue_family(first, rest, opts);
  members.insert(members.begin(), sphere::FamilyMember{first, true, ""});

  json out = json::array();
  bool all = members.size() == a.H.size();
  for (size_t i = 0; i < members.size(); ++i) {
    const auto& mem = members[i];
    if (!mem.converged) {
      out.push_back({{"H", a.H[i]}, {"converged", false}, {"error", mem.error}});
      all = false;
      continue;
    }
    if (!a.obj_prefix.empty()) {
      std::ostringstream name;
      name << a.obj_prefix << "_H" << mem.sphere.target_H << ".obj";
      mesh::write_obj(out_path(name.str()), mem.sphere.mesh, mem.sphere.target_H, &mem.sphere.normals);
    }
    bool passed = false;
    json j = checked_report(mem.sphere, a.tol, false, &passed);
    j["converged"] = true;
    out.push_back(j);
    all = all && passed;
    std::cerr << "H = " << mem.sphere.target_H << (passed ? ": ok" : ": FAILED") << '\n';
  }
  emit(out, a.report);
  return all ? kOk : kCheckFailed;
}

struct VerifyArgs {
  std::string mesh;
  double H = 0.0;
  bool has_H = false;
  double tol = 1e-2;
  std::string report;
  bool quad = false;
};

int run_verify(const VerifyArgs& a) {
  const auto obj = mesh::read_obj(a.mesh);
  double H = a.H;
  if (!a.has_H) {
    if (!obj.H) throw NumericalError(ErrorKind::InvalidArgument, "no --H given and the mesh carries none");
    H = *obj.H;
  }
  warn_conjecture(H);
  const auto m = sphere::describe(obj.mesh, H);
  bool passed = false;
  const json j = checked_report(m, a.tol, a.quad, &passed);
  emit(j, a.report);
  if (!passed)
    for (const auto& f : j["details"]["failures"]) std::cerr << "check failed: " << f.get<std::string>() << '\n';
  return passed ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct MinimalArgs {
  std::string family = "affine";
  double a = 1.0, b = 0.0;
  int points = 1000;
  unsigned seed = 1;
  double box = 2.0;
  double tol = 1e-10;
  std::string out;
};

int run_minimal(const MinimalArgs& a) {
  const auto g = minimal::entire_family(minimal::parse_family(a.family), a.a, a.b);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> u(-a.box, a.box);
  double worst = 0.0;
  for (int i = 0; i < a.points; ++i) {
    const double x2 = u(rng), x3 = u(rng);
    worst = std::max(worst, std::abs(minimal::residual(g, x2, x3)));
  }
  const bool ok = worst <= a.tol;
  emit({{"family", minimal::family_name(g.family)}, {"a", a.a}, {"b", a.b}, {"points", a.points},
        {"maxResidual", worst}, {"passed", ok}},
       a.out);
  return ok ? kOk : kCheckFailed;
}

struct GaussmapArgs {
  std::string input;
  std::string surface;
  double integrability_tol = 1e-2;
  std::string out;
};

int run_gaussmap(const GaussmapArgs& a) {
  const auto f = gauss::read_field_csv(a.input);
  json j = {{"H", f.H}, {"samples", f.samples.size()}, {"admissible", f.admissible()}};
  if (f.grid) {
    j["pdeResidual"] = gauss::pde_residual(f, gauss::Stencil::Second).max_abs();
    gauss::IntegrationOptions opts;
    opts.tolerance = a.integrability_tol;
    opts.throw_on_failure = false;
    const auto patch = gauss::integrate_representation(f, Point{0.0, 0.0, 0.0}, opts);
    j["integrabilityResidual"] = patch.integrability_residual;
    const bool ok = patch.integrability_residual <= a.integrability_tol;
    j["integrable"] = ok;
    if (ok && !a.surface.empty()) {
      std::ofstream out(out_path(a.surface));
      if (!out) throw NumericalError(ErrorKind::Io, "cannot write " + a.surface);
      out << "i,j,x1,x2,x3\n";
      out.precision(17);
      for (int i = 0; i < patch.grid.nu; ++i)
        for (int jj = 0; jj < patch.grid.nv; ++jj) {
          const auto& p = patch.samples[patch.grid.index(i, jj)];
          out << i << ',' << jj << ',' << p.x1 << ',' << p.x2 << ',' << p.x3 << '\n';
        }
    }
    emit(j, a.out);
    if (!ok) std::cerr << "check failed: integrability residual above tolerance\n";
    return ok ? kOk : kCheckFailed;
  }
  emit(j, a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMC surfaces in Sol3"};
  app.require_subcommand(1);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "profile curve of the horizontal cylinder");
  profile->add_option("--H", pa.H, "mean curvature")->check(CLI::PositiveNumber);
  profile->add_option("-n", pa.n, "samples")->check(CLI::Range(2, 10000000));
  profile->add_option("-o,--out", pa.out, "CSV output (stdout if omitted)");

  CylinderArgs ca;
  auto* cyl = app.add_subcommand("cylinder", "Gauss map of the horizontal cylinder");
  cyl->add_option("--H", ca.H, "mean curvature")->check(CLI::PositiveNumber);
  cyl->add_option("--nu", ca.nu, "samples along one period")->check(CLI::Range(16, 10000000));
  cyl->add_option("-o,--out", ca.out, "Gauss field CSV");
  cyl->add_option("--summary", ca.summary, "JSON summary (stdout if omitted)");

  SphereArgs sa;
  auto* sph = app.add_subcommand("sphere", "solve and verify a CMC sphere");
  sph->add_option("--H", sa.H, "mean curvature")->check(CLI::PositiveNumber);
  sph->add_option("-r,--resolution", sa.resolution, "target vertex count")->check(CLI::Range(18, 2000000));
  sph->add_option("--tol", sa.tol, "bound on max |H_v - H|")->check(CLI::PositiveNumber);
  sph->add_option("--obj", sa.obj, "OBJ output");
  sph->add_option("--report", sa.report, "JSON report (stdout if omitted)");
  sph->add_flag("!--no-quad", sa.quad, "skip the quadratic-differential checks");
  sph->add_flag("-q,--quiet", sa.quiet, "no solver log");

  FamilyArgs fa;
  auto* fam = app.add_subcommand("family", "continuation through a list of H values");
  fam->add_option("--H", fa.H, "mean curvatures, in order")->delimiter(',')->check(CLI::PositiveNumber);
  fam->add_option("-r,--resolution", fa.resolution, "target vertex count")->check(CLI::Range(18, 2000000));
  fam->add_option("--tol", fa.tol, "bound on max |H_v - H|")->check(CLI::PositiveNumber);
  fam->add_option("--report", fa.report, "JSON array of reports (stdout if omitted)");
  fam->add_option("--obj-prefix", fa.obj_prefix, "write one OBJ per member");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check a closed mesh as a CMC sphere");
  ver->add_option("--mesh", va.mesh, "OBJ input")->required()->check(CLI::ExistingFile);
  auto* hopt = ver->add_option("--H", va.H, "target mean curvature (default: from the OBJ)");
  ver->add_option("--tol", va.tol, "bound on max |H_v - H|")->check(CLI::PositiveNumber);
  ver->add_option("--report", va.report, "JSON report (stdout if omitted)");
  ver->add_flag("--quad", va.quad, "also run the quadratic-differential checks");

  MinimalArgs ma;
  auto* mini = app.add_subcommand("minimal", "residual of an entire minimal graph x1 = f(x2, x3)");
  mini->add_option("--family", ma.family, "affine | exp | mixedexp | exp2");
  mini->add_option("--a", ma.a);
  mini->add_option("--b", ma.b);
  mini->add_option("--points", ma.points, "random sample points")->check(CLI::Range(1, 100000000));
  mini->add_option("--seed", ma.seed);
  mini->add_option("--box", ma.box, "sample (x2, x3) in [-box, box]^2")->check(CLI::PositiveNumber);
  mini->add_option("--tol", ma.tol);
  mini->add_option("-o,--out", ma.out, "JSON output (stdout if omitted)");

  GaussmapArgs ga;
  auto* gm = app.add_subcommand("gaussmap", "residual and integrability of a Gauss field CSV");
  gm->add_option("-i,--input", ga.input, "field CSV")->required()->check(CLI::ExistingFile);
  gm->add_option("--surface", ga.surface, "CSV of the integrated surface");
  gm->add_option("--integrability-tol", ga.integrability_tol)->check(CLI::PositiveNumber);
  gm->add_option("-o,--out", ga.out, "JSON output (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*profile) return run_profile(pa);
    if (*cyl) return run_cylinder(ca);
    if (*sph) return run_sphere(sa);
    if (*fam) return run_family(fa);
    if (*ver) {
      va.has_H = hopt->count() > 0;
      return run_verify(va);
    }
    if (*mini) return run_minimal(ma);
    if (*gm) return run_gaussmap(ga);
  } catch (const NumericalError& e) {
    return numerical_failure(e);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}
