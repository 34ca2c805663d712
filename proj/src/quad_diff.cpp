#include "sol3/quad_diff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include <Eigen/Dense>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "sol3/errors.hpp"

namespace sol3::quad {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using BPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using Tree = bgi::rtree<std::pair<BPoint, int>, bgi::quadratic<16>>;

struct LTable::Index {
  Tree tree;
};

namespace {

std::shared_ptr<const LTable::Index> make_index(const std::vector<LSample>& s, double* spacing) {
  auto idx = std::make_shared<LTable::Index>();
  std::vector<std::pair<BPoint, int>> pts;
  pts.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i)
    pts.emplace_back(BPoint(s[i].q.real(), s[i].q.imag()), static_cast<int>(i));
  idx->tree = Tree(pts.begin(), pts.end());
  // Median nearest-neighbor distance, from a subsample.
  std::vector<double> nn;
  const size_t stride = std::max<size_t>(1, s.size() / 500);
  for (size_t i = 0; i < s.size(); i += stride) {
    std::vector<std::pair<BPoint, int>> hit;
    idx->tree.query(bgi::nearest(BPoint(s[i].q.real(), s[i].q.imag()), 2), std::back_inserter(hit));
    for (const auto& h : hit)
      if (h.second != static_cast<int>(i)) nn.push_back(std::abs(s[h.second].q - s[i].q));
  }
  if (nn.empty()) {
    *spacing = 0.0;
  } else {
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    *spacing = nn[nn.size() / 2];
  }
  return idx;
}

// Sample values of L (direct) or phi (dual) from one Gauss sample.
LSample l_sample(const gauss::GaussSample& s, double H) {
  const cplx rho = s.conj_dz() / s.dz;
  const cplx M = gauss::coeff_M(s.value, H);
  return {s.value, s.chart == gauss::Chart::Direct ? -M * rho : M * rho};
}

}  // namespace

LTable::LTable(double H, std::vector<LSample> direct, std::vector<LSample> dual, int neighbors)
    : H_(H), neighbors_(neighbors), direct_(std::move(direct)), dual_(std::move(dual)) {
  if (neighbors_ < 6) throw NumericalError(ErrorKind::InvalidArgument, "need at least 6 neighbors");
  direct_index_ = make_index(direct_, &direct_spacing_);
  dual_index_ = make_index(dual_, &dual_spacing_);
}

LocalFit LTable::fit(gauss::Chart chart, cplx q) const {
  const bool direct = chart == gauss::Chart::Direct;
  const auto& samples = direct ? direct_ : dual_;
  const auto& index = direct ? direct_index_ : dual_index_;
  const double spacing = direct ? direct_spacing_ : dual_spacing_;
  if (!index || static_cast<int>(samples.size()) < neighbors_)
    throw NumericalError(ErrorKind::OutOfSupport, "L table has too few samples in this chart");

  std::vector<std::pair<BPoint, int>> hit;
  index->tree.query(bgi::nearest(BPoint(q.real(), q.imag()), neighbors_), std::back_inserter(hit));
  double reach = 0.0, nearest = std::numeric_limits<double>::infinity();
  for (const auto& h : hit) {
    const double d = std::abs(samples[h.second].q - q);
    reach = std::max(reach, d);
    nearest = std::min(nearest, d);
  }
  if (nearest > 5.0 * spacing + 1e-12)
    throw NumericalError(ErrorKind::OutOfSupport, "query point is outside the sampled region");
  if (reach <= 0.0) reach = 1.0;

  // Inverse-distance weighted quadratic least squares in scaled coordinates.
  const int k = static_cast<int>(hit.size());
  Eigen::MatrixXd A(k, 6);
  Eigen::MatrixXcd b(k, 1);
  for (int r = 0; r < k; ++r) {
    const cplx d = (samples[hit[r].second].q - q) / reach;
    const double x = d.real(), y = d.imag();
    const double w = 1.0 / std::sqrt(std::norm(d) + 0.01);
    A.row(r) << w, w * x, w * y, w * x * x, w * x * y, w * y * y;
    b(r, 0) = w * samples[hit[r].second].value;
  }
  // Minimum-norm solve: near the zero of g the images crowd onto a curve and
  // the quadratic terms across it are not determined.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A.cast<cplx>());
  cod.setThreshold(1e-6);
  const Eigen::MatrixXcd c = cod.solve(b);
  const cplx fx = c(1, 0) / reach, fy = c(2, 0) / reach;
  return {c(0, 0), 0.5 * (fx - cplx(0, 1) * fy), 0.5 * (fx + cplx(0, 1) * fy)};
}

cplx LTable::L(const gauss::ExtendedComplex& q) const {
  if (q.is_infinite()) return 0.0;
  if (q.abs() <= 1.0) return fit(gauss::Chart::Direct, q.value()).value;
  const cplx w = cplx(0, 1) / q.value();
  const cplx w2 = w * w;
  return w2 * w2 * fit(gauss::Chart::Dual, w).value;
}

LTable LTable::scaled(double factor) const {
  auto d = direct_, u = dual_;
  for (auto& s : d) s.value *= factor;
  for (auto& s : u) s.value *= factor;
  return LTable(H_, std::move(d), std::move(u), neighbors_);
}

gauss::GaussField sphere_gauss_field(const sphere::CmcSphereMesh& m, std::vector<double>* jacobians) {
  const auto adj = mesh::build_adjacency(m.mesh);
  const auto fits = fit::fit_surface(m.mesh, adj, m.normals);
  const int n = m.mesh.num_vertices();
  std::vector<gauss::ExtendedComplex> values(n);
  for (int v = 0; v < n; ++v) values[v] = fit::gauss_value(fits[v].normal);

  gauss::GaussField f;
  f.H = m.target_H;
  f.samples.resize(n);
  f.points.resize(n);
  std::vector<double> jac(n);
  int failures = 0;
#pragma omp parallel for schedule(static) reduction(+ : failures)
  for (int v = 0; v < n; ++v) {
    try {
      const auto jet = fit::gauss_jet(m.mesh, v, mesh::k_ring(adj, v, 2), fits[v].frame, values);
      f.samples[v] = jet.sample;
      jac[v] = jet.jacobian;
    } catch (const NumericalError&) {
      ++failures;
    }
    f.points[v] = {m.mesh.vertices[v].x1, m.mesh.vertices[v].x2};
  }
  if (failures > 0) throw NumericalError(ErrorKind::Degenerate, "gauss jet failed at some vertices");
  if (jacobians) *jacobians = std::move(jac);
  return f;
}

LTable build_L(const sphere::CmcSphereMesh& m) {
  std::vector<double> jac;
  const auto f = sphere_gauss_field(m, &jac);
  return build_L(f, jac);
}

LTable build_L(const gauss::GaussField& f, const std::vector<double>& jacobians) {
  std::vector<LSample> direct, dual;
  for (size_t v = 0; v < f.samples.size(); ++v) {
    if (!(jacobians[v] > 0.0))
      throw NumericalError(ErrorKind::Degenerate, "gauss map jacobian not positive at vertex " + std::to_string(v));
    const auto& s = f.samples[v];
    const double a = std::abs(s.value);
    // Normalized samples have |value| <= 1; the other chart gets the overlap.
    (s.chart == gauss::Chart::Direct ? direct : dual).push_back(l_sample(s, f.H));
    if (a >= 1.0 / kChartOverlap && a > 0.0) {
      const auto other = gauss::in_chart(s, s.chart == gauss::Chart::Direct ? gauss::Chart::Dual : gauss::Chart::Direct);
      (other.chart == gauss::Chart::Direct ? direct : dual).push_back(l_sample(other, f.H));
    }
  }
  return LTable(f.H, std::move(direct), std::move(dual));
}

LVerification verify_L(const LTable& t) {
  LVerification out;
  const double H = t.H();
  for (const auto& s : t.direct()) {
    const double M = std::abs(gauss::coeff_M(s.q, H));
    if (M > 0.0) out.ratio_max = std::max(out.ratio_max, std::abs(s.value) / M);
    if (std::abs(s.q) > 1.0) continue;
    const LocalFit lf = t.fit(gauss::Chart::Direct, s.q);
    const cplx A = gauss::coeff_A(s.q, H), B = gauss::coeff_B(s.q, H), Mq = gauss::coeff_M(s.q, H);
    const cplx L = lf.value;
    const cplx res = (lf.d_q + 2.0 * L * A) * std::conj(L) - (lf.d_qbar + 2.0 * L * B + Mq * std::conj(B)) * std::conj(Mq);
    out.eqL_residual = std::max(out.eqL_residual, std::abs(res));
  }
  std::vector<double> decay;
  for (const auto& s : t.dual()) {
    const double M = std::abs(gauss::coeff_M(s.q, H));
    if (M > 0.0) out.ratio_max = std::max(out.ratio_max, std::abs(s.value) / M);
    if (std::abs(s.q) <= kDecayRadius) decay.push_back(std::abs(s.value));
  }
  if (!decay.empty()) {
    out.decay_max = *std::max_element(decay.begin(), decay.end());
    std::nth_element(decay.begin(), decay.begin() + decay.size() / 2, decay.end());
    out.decay_median = decay[decay.size() / 2];
  }
  return out;
}

namespace {

// Q in the sample's chart. In the dual chart L(g) g_z^2 + M(g) g_z conj(g)_z
// becomes M(w) w_z conj(w)_z - phi(w) w_z^2 (the factor w^4 cancels).
cplx q_at(const gauss::GaussSample& s, const LTable& t, double* qhat) {
  const double H = t.H();
  const cplx M = gauss::coeff_M(s.value, H);
  cplx Q;
  if (s.chart == gauss::Chart::Direct) {
    const cplx L = t.fit(gauss::Chart::Direct, s.value).value;
    Q = L * s.dz * s.dz + M * s.dz * s.conj_dz();
  } else {
    const cplx phi = t.fit(gauss::Chart::Dual, s.value).value;
    Q = M * s.dz * s.conj_dz() - phi * s.dz * s.dz;
  }
  const double scale = std::abs(M) * std::norm(s.dz);
  *qhat = scale > 0.0 ? std::abs(Q) / scale : 0.0;
  return Q;
}

}  // namespace

QReport Q_eval(const gauss::GaussField& f, const LTable& t, double noise_floor) {
  QReport r;
  const int n = static_cast<int>(f.samples.size());
  r.Q.resize(n);
  r.Qhat.resize(n);
  for (int i = 0; i < n; ++i) {
    r.Q[i] = q_at(gauss::normalized(f.samples[i]), t, &r.Qhat[i]);
    r.vanish_max = std::max(r.vanish_max, std::abs(r.Q[i]));
    r.vanish_rel_max = std::max(r.vanish_rel_max, r.Qhat[i]);
  }
  if (!f.grid) return r;

  // Q_zbar = (Q_u + i Q_v) / 2 by centered differences.
  const auto& g = *f.grid;
  for (int i = 1; i + 1 < g.nu; ++i)
    for (int j = 1; j + 1 < g.nv; ++j) {
      const int c = g.index(i, j);
      if (!(r.Qhat[c] > noise_floor)) continue;
      const cplx Qu = (r.Q[g.index(i + 1, j)] - r.Q[g.index(i - 1, j)]) / (2.0 * g.du);
      const cplx Qv = (r.Q[g.index(i, j + 1)] - r.Q[g.index(i, j - 1)]) / (2.0 * g.dv);
      const double ratio = std::abs(0.5 * (Qu + cplx(0, 1) * Qv)) / std::abs(r.Q[c]);
      r.cr_ratio_max = std::max(r.cr_ratio_max, ratio);
      ++r.cr_samples;
    }
  return r;
}

nlohmann::json to_json(const LTable& t) {
  auto rows = [](const std::vector<LSample>& s) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : s) a.push_back({x.q.real(), x.q.imag(), x.value.real(), x.value.imag()});
    return a;
  };
  return {{"H", t.H()}, {"neighbors", t.neighbors()}, {"direct", rows(t.direct())}, {"dual", rows(t.dual())}};
}

LTable table_from_json(const nlohmann::json& j) {
  auto rows = [](const nlohmann::json& a) {
    std::vector<LSample> s;
    for (const auto& r : a) s.push_back({{r.at(0).get<double>(), r.at(1).get<double>()}, {r.at(2).get<double>(), r.at(3).get<double>()}});
    return s;
  };
  try {
    return LTable(j.at("H").get<double>(), rows(j.at("direct")), rows(j.at("dual")), j.value("neighbors", 30));
  } catch (const nlohmann::json::exception& e) {
    throw NumericalError(ErrorKind::Io, std::string("malformed L table: ") + e.what());
  }
}

void write_table(const LTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericalError(ErrorKind::Io, "cannot write " + path);
  out << to_json(t).dump() << '\n';
}

LTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericalError(ErrorKind::Io, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw NumericalError(ErrorKind::Io, std::string("malformed L table: ") + e.what());
  }
  return table_from_json(j);
}

}  // namespace sol3::quad
