#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sol3/errors.hpp"
#include "sol3/kernels.hpp"
#include "sol3/sphere.hpp"
#include "sol3/surface_fit.hpp"

namespace sol3::sphere {

namespace {

// Raising the index of dV and converting to the frame gives
// (e^{-x3} w1, e^{x3} w2, w3), which points out of the domain.
FrameVector inward_normal(const Point& p, const Eigen::Vector3d& w) {
  const Eigen::Vector3d f(std::exp(-p.x3) * w[0], std::exp(p.x3) * w[1], w[2]);
  const double len = f.norm();
  if (len == 0.0) throw NumericalError(ErrorKind::DegenerateMesh, "zero volume gradient");
  return FrameVector::from(-f / len);
}

// The discrete H_v is inconsistent at vertices whose valence is not six (on
// a non-umbilic surface the error does not shrink under refinement).
bool irregular(const mesh::Adjacency& adj, int v) { return adj.neighbors[v].size() != 6; }

// Cubic-fit mean curvature at v, or the discrete value when the star is too
// small to fit (open boundaries).
double fitted_mean(const mesh::TriMesh& m, const mesh::Adjacency& adj, const kernels::AreaVolume& av,
                   int v, double fallback) {
  const std::vector<int> ring = mesh::k_ring(adj, v, 2);
  if (ring.size() < 9) return fallback;
  try {
    const FrameVector n = inward_normal(m.vertices[v], av.volume_grad.row(v).transpose());
    return fit::fit_vertex(m, v, ring, n).mean;
  } catch (const NumericalError&) {
    return fallback;
  }
}

std::vector<double> hybrid_mean_curvature(const mesh::TriMesh& m, const mesh::Adjacency& adj,
                                         const kernels::AreaVolume& av) {
  std::vector<double> h = kernels::mean_curvature_from_gradients(m, av);
  for (int v = 0; v < m.num_vertices(); ++v)
    if (irregular(adj, v)) h[v] = fitted_mean(m, adj, av, v, h[v]);
  return h;
}

}  // namespace

std::vector<FrameVector> vertex_normals(const mesh::TriMesh& m, const mesh::Adjacency& adj) {
  const kernels::AreaVolume av = kernels::parallel::area_volume(m, adj);
  std::vector<FrameVector> n(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) n[v] = inward_normal(m.vertices[v], av.volume_grad.row(v).transpose());
  return n;
}

std::vector<double> vertex_areas(const mesh::TriMesh& m, const mesh::Adjacency& adj) {
  return kernels::parallel::area_volume(m, adj).vertex_area;
}

std::vector<double> mean_curvature_field(const mesh::TriMesh& m) {
  const mesh::Adjacency adj = mesh::build_adjacency(m);
  return hybrid_mean_curvature(m, adj, kernels::parallel::area_volume(m, adj));
}

CmcSphereMesh describe(const mesh::TriMesh& m, double target_H) {
  CmcSphereMesh s;
  s.mesh = m;
  s.target_H = target_H;
  const mesh::Adjacency adj = mesh::build_adjacency(m);
  const kernels::AreaVolume av = kernels::parallel::area_volume(m, adj);
  s.area = av.area;
  s.volume = av.volume;
  s.mean_curvature = hybrid_mean_curvature(m, adj, av);
  s.normals.resize(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) s.normals[v] = inward_normal(m.vertices[v], av.volume_grad.row(v).transpose());
  s.vertex_area = av.vertex_area;
  s.gauss.resize(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) s.gauss[v] = fit::gauss_value(s.normals[v]);
  double worst = 0.0;
  for (double h : s.mean_curvature) worst = std::max(worst, std::abs(h - target_H));
  s.residual = worst;
  return s;
}

std::vector<int> symmetry_orbits(const mesh::Octasphere& oct, int* num_orbits) {
  std::map<std::array<int, 3>, int> index;
  for (int v = 0; v < static_cast<int>(oct.lattice.size()); ++v) index[oct.lattice[v]] = v;
  std::vector<int> parent(oct.lattice.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  auto join = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int v = 0; v < static_cast<int>(oct.lattice.size()); ++v) {
    const auto& k = oct.lattice[v];
    join(v, index.at({k[1], -k[0], -k[2]}));  // sigma
    join(v, index.at({-k[0], k[1], k[2]}));   // tau
  }
  std::vector<int> orbit(parent.size());
  std::map<int, int> label;
  for (int v = 0; v < static_cast<int>(parent.size()); ++v) {
    const int r = find(v);
    auto it = label.find(r);
    if (it == label.end()) it = label.emplace(r, static_cast<int>(label.size())).first;
    orbit[v] = it->second;
  }
  if (num_orbits) *num_orbits = static_cast<int>(label.size());
  return orbit;
}

Point graph_point(double r, const Eigen::Vector3d& d) {
  const Eigen::Vector3d y = r * d;
  return {y[0] * std::exp(-y[2]), y[1] * std::exp(y[2]), y[2]};
}

namespace {

void say(const SolveOptions& opts, const std::string& msg) {
  if (opts.log) opts.log(msg);
}

// Graph p_v = graph_point(r_o, d_v) over the octasphere, one unknown per orbit.
class RadialProblem {
 public:
  RadialProblem(const mesh::Octasphere& oct, bool symmetric) : oct_(oct) {
    mesh_.faces = oct.faces;
    mesh_.vertices.resize(oct.directions.size());
    adj_ = mesh::build_adjacency(mesh_);
    const int nv = mesh_.num_vertices();
    if (symmetric) {
      orbit_ = symmetry_orbits(oct, &num_orbits_);
    } else {
      orbit_.resize(nv);
      std::iota(orbit_.begin(), orbit_.end(), 0);
      num_orbits_ = nv;
    }
    rep_.assign(num_orbits_, -1);
    for (int v = 0; v < nv; ++v)
      if (rep_[orbit_[v]] < 0) rep_[orbit_[v]] = v;
    // Orbits whose radius moves H at each representative.
    irregular_.resize(num_orbits_);
    for (int o = 0; o < num_orbits_; ++o) irregular_[o] = irregular(adj_, rep_[o]);
    influence_.resize(num_orbits_);
    for (int o = 0; o < num_orbits_; ++o) {
      const int v = rep_[o];
      auto& inf = influence_[o];
      inf.push_back(orbit_[v]);
      for (int w : mesh::k_ring(adj_, v, irregular_[o] ? 2 : 1)) inf.push_back(orbit_[w]);
      std::sort(inf.begin(), inf.end());
      inf.erase(std::unique(inf.begin(), inf.end()), inf.end());
    }
    color_orbits();
  }

  int num_unknowns() const { return num_orbits_; }
  int num_colors() const { return num_colors_; }
  const mesh::TriMesh& mesh() const { return mesh_; }
  const mesh::Adjacency& adjacency() const { return adj_; }
  const std::vector<int>& orbit() const { return orbit_; }

  void set(const Eigen::VectorXd& r) {
    for (int v = 0; v < mesh_.num_vertices(); ++v)
      mesh_.vertices[v] = graph_point(r[orbit_[v]], oct_.directions[v]);
  }

  // H at the representative of every orbit.
  Eigen::VectorXd mean_curvature(const Eigen::VectorXd& r) {
    set(r);
    const kernels::AreaVolume av = kernels::parallel::area_volume(mesh_, adj_);
    const std::vector<double> h = kernels::mean_curvature_from_gradients(mesh_, av);
    Eigen::VectorXd out(num_orbits_);
    for (int o = 0; o < num_orbits_; ++o) {
      const int v = rep_[o];
      out[o] = irregular_[o] ? fitted_mean(mesh_, adj_, av, v, h[v]) : h[v];
    }
    return out;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& r, const Eigen::VectorXd& h0) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int c = 0; c < num_colors_; ++c) {
      Eigen::VectorXd rp = r;
      Eigen::VectorXd step = Eigen::VectorXd::Zero(num_orbits_);
      for (int o = 0; o < num_orbits_; ++o) {
        if (color_[o] != c) continue;
        step[o] = 1e-7 * std::max(std::abs(r[o]), 1e-3);
        rp[o] += step[o];
      }
      const Eigen::VectorXd hp = mean_curvature(rp);
      for (int row = 0; row < num_orbits_; ++row)
        for (int o : influence_[row])
          if (color_[o] == c) trips.emplace_back(row, o, (hp[row] - h0[row]) / step[o]);
    }
    set(r);
    Eigen::SparseMatrix<double> J(num_orbits_, num_orbits_);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
  }

 private:
  void color_orbits() {
    // Two orbits conflict when both influence a common representative.
    std::vector<std::vector<int>> conflicts(num_orbits_);
    for (const auto& inf : influence_)
      for (int a : inf)
        for (int b : inf)
          if (a != b) conflicts[a].push_back(b);
    color_.assign(num_orbits_, -1);
    num_colors_ = 0;
    std::vector<char> used;
    for (int o = 0; o < num_orbits_; ++o) {
      used.assign(num_colors_ + 1, 0);
      for (int b : conflicts[o])
        if (color_[b] >= 0) used[color_[b]] = 1;
      int c = 0;
      while (used[c]) ++c;
      color_[o] = c;
      num_colors_ = std::max(num_colors_, c + 1);
    }
  }

  const mesh::Octasphere& oct_;
  mesh::TriMesh mesh_;
  mesh::Adjacency adj_;
  std::vector<int> orbit_;
  std::vector<int> rep_;
  int num_orbits_ = 0;
  std::vector<char> irregular_;
  std::vector<std::vector<int>> influence_;
  std::vector<int> color_;
  int num_colors_ = 0;
};

struct NewtonResult {
  Eigen::VectorXd r;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

NewtonResult newton(RadialProblem& prob, Eigen::VectorXd r, double H, const SolveOptions& opts) {
  NewtonResult res;
  Eigen::VectorXd F = prob.mean_curvature(r).array() - H;
  double norm = F.cwiseAbs().maxCoeff();
  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it;
    if (norm <= opts.newton_tol) break;
    const Eigen::SparseMatrix<double> J = prob.jacobian(r, F.array() + H);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NumericalError(ErrorKind::NotConverged, "singular Jacobian");
    const Eigen::VectorXd delta = lu.solve(-F);
    // Backtracking on the max-norm residual; radii stay positive.
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < 12; ++k, alpha *= 0.5) {
      const Eigen::VectorXd trial = r + alpha * delta;
      if (trial.minCoeff() <= 0.0) continue;
      Eigen::VectorXd Ft;
      try {
        Ft = prob.mean_curvature(trial).array() - H;
      } catch (const NumericalError&) {
        continue;
      }
      const double nt = Ft.cwiseAbs().maxCoeff();
      if (std::isfinite(nt) && nt < norm) {
        r = trial;
        F = Ft;
        norm = nt;
        accepted = true;
        break;
      }
    }
    std::ostringstream msg;
    msg << "  H=" << H << " iter " << it + 1 << " max|H_v-H|=" << norm << " step=" << alpha;
    say(opts, msg.str());
    if (!accepted) break;
    res.iterations = it + 1;
  }
  prob.set(r);
  res.r = r;
  res.residual = norm;
  res.converged = norm <= opts.newton_tol || norm <= 1e-3 * opts.tol;
  return res;
}

CmcSphereMesh package(const RadialProblem& prob, const mesh::Octasphere& oct, const NewtonResult& nr,
                      double H) {
  CmcSphereMesh s = describe(prob.mesh(), H);
  s.directions = oct.directions;
  s.lattice = oct.lattice;
  s.radii.resize(oct.directions.size());
  for (int v = 0; v < prob.mesh().num_vertices(); ++v) s.radii[v] = nr.r[prob.orbit()[v]];
  s.iterations = nr.iterations;
  return s;
}

Eigen::VectorXd orbit_radii(const RadialProblem& prob, const std::vector<double>& per_vertex, double scale) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(prob.num_unknowns());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(prob.num_unknowns());
  for (int v = 0; v < prob.mesh().num_vertices(); ++v) {
    r[prob.orbit()[v]] += per_vertex[v] * scale;
    count[prob.orbit()[v]] += 1.0;
  }
  return r.cwiseQuotient(count);
}

// Continuation in H from `r` at H_from to H_to with adaptive steps.
NewtonResult continuation(RadialProblem& prob, Eigen::VectorXd r, double H_from, double H_to,
                          const SolveOptions& opts) {
  double H = H_from;
  double ratio = 0.8;  // multiplicative step in H
  NewtonResult last{r, 0.0, 0, true};
  while (H != H_to) {
    double next = H_to < H ? std::max(H_to, H * ratio) : std::min(H_to, H / ratio);
    const Eigen::VectorXd guess = last.r * (H / next);
    NewtonResult nr;
    try {
      nr = newton(prob, guess, next, opts);
    } catch (const NumericalError&) {
      nr.converged = false;
    }
    if (nr.converged) {
      last = nr;
      H = next;
      ratio = std::min(0.8, std::sqrt(ratio));
    } else {
      ratio = std::sqrt(ratio);
      if (ratio > 0.995)
        throw NumericalError(ErrorKind::NotConverged,
                             "continuation stalled near H=" + std::to_string(H));
    }
  }
  return last;
}

void check_result(const CmcSphereMesh& s, const SolveOptions& opts) {
  if (!(s.residual <= opts.tol))
    throw NumericalError(ErrorKind::NotConverged,
                         "max |H_v - H| = " + std::to_string(s.residual) + " exceeds tol");
}

}  // namespace

CmcSphereMesh solve(double H, const SolveOptions& opts) {
  if (!(H > 0.0)) throw NumericalError(ErrorKind::InvalidArgument, "H must be positive");
  const mesh::Octasphere oct = mesh::octasphere(mesh::frequency_for_vertices(opts.resolution));
  RadialProblem prob(oct, opts.symmetric);
  std::ostringstream msg;
  msg << "sphere: " << oct.directions.size() << " vertices, " << prob.num_unknowns() << " unknowns, "
      << prob.num_colors() << " colors";
  say(opts, msg.str());

  const double H0 = std::max(H, opts.direct_H);
  Eigen::VectorXd r = Eigen::VectorXd::Constant(prob.num_unknowns(), 1.0 / H0);
  NewtonResult nr = newton(prob, r, H0, opts);
  if (!nr.converged)
    throw NumericalError(ErrorKind::NotConverged, "no convergence from the coordinate sphere at H=" +
                                                      std::to_string(H0));
  if (H0 != H) nr = continuation(prob, nr.r, H0, H, opts);
  CmcSphereMesh s = package(prob, oct, nr, H);
  check_result(s, opts);
  return s;
}

CmcSphereMesh solve_from(const CmcSphereMesh& warm, double H, const SolveOptions& opts) {
  if (warm.directions.empty())
    throw NumericalError(ErrorKind::InvalidArgument, "warm start needs a solver-produced sphere");
  mesh::Octasphere oct;
  oct.directions = warm.directions;
  oct.lattice = warm.lattice;
  oct.faces = warm.mesh.faces;
  oct.frequency = mesh::frequency_for_vertices(static_cast<int>(warm.directions.size()));
  RadialProblem prob(oct, opts.symmetric);
  const Eigen::VectorXd r = orbit_radii(prob, warm.radii, 1.0);
  const NewtonResult nr = H == warm.target_H ? newton(prob, r, H, opts)
                                             : continuation(prob, r, warm.target_H, H, opts);
  CmcSphereMesh s = package(prob, oct, nr, H);
  check_result(s, opts);
  return s;
}

std::vector<FamilyMember> continue_family(const CmcSphereMesh& m0, const std::vector<double>& targets,
                                          const SolveOptions& opts) {
  std::vector<FamilyMember> out;
  for (double H : targets) {
    const CmcSphereMesh& prev = out.empty() ? m0 : out.back().sphere;
    FamilyMember fm;
    try {
      fm.sphere = solve_from(prev, H, opts);
      fm.converged = true;
    } catch (const NumericalError& e) {
      fm.error = e.what();
      fm.sphere.target_H = H;
    }
    out.push_back(std::move(fm));
    if (!out.back().converged) break;
  }
  return out;
}

}  // namespace sol3::sphere
