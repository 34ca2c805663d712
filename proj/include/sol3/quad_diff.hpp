#pragma once

// The function L on the Riemann sphere built from a sphere's Gauss map G by
// L(G) = -M(G) conj(G)_z / G_z, and the quadratic differential
// Q = L(g) g_z^2 + M(g) g_z conj(g)_z it defines on any Gauss field.
//
// Near q = inf the table stores phi(w) = M(w) conj(w)_z / w_z in the chart
// w = i/q, where L(q) = w^4 phi(w).

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sol3/gauss_map.hpp"
#include "sol3/sphere.hpp"
#include "sol3/surface_fit.hpp"

namespace sol3::quad {

using gauss::cplx;

struct LSample {
  cplx q;      // chart coordinate (q or w)
  cplx value;  // L(q) or phi(w)
};

struct LocalFit {
  cplx value, d_q, d_qbar;
};

class LTable {
 public:
  LTable() = default;
  LTable(double H, std::vector<LSample> direct, std::vector<LSample> dual, int neighbors = 30);

  double H() const { return H_; }
  int neighbors() const { return neighbors_; }
  const std::vector<LSample>& direct() const { return direct_; }
  const std::vector<LSample>& dual() const { return dual_; }

  /// Weighted quadratic least squares over the nearest samples of one chart.
  /// Throws OutOfSupport when the chart has no samples near q.
  LocalFit fit(gauss::Chart chart, cplx q) const;

  /// L at any point; L(inf) = 0.
  cplx L(const gauss::ExtendedComplex& q) const;

  /// Copy with every stored value multiplied by `factor`.
  LTable scaled(double factor) const;

  struct Index;  // spatial index, defined in the source

 private:
  double H_ = 0.0;
  int neighbors_ = 30;
  std::vector<LSample> direct_, dual_;
  std::shared_ptr<const Index> direct_index_, dual_index_;
  double direct_spacing_ = 0.0, dual_spacing_ = 0.0;
};

/// Charts overlap up to |q| = kChartOverlap so fits near the unit circle see
/// samples on both sides.
constexpr double kChartOverlap = 1.3;
/// The decay statistics use the neighborhood |q| >= 2 of q = inf.
constexpr double kDecayRadius = 0.5;

/// Gauss field of a solved sphere: per-vertex jets from the fitted normals.
/// Scattered; the parameter points are the vertex (x1, x2).
gauss::GaussField sphere_gauss_field(const sphere::CmcSphereMesh& m, std::vector<double>* jacobians = nullptr);

/// Throws Degenerate if the Gauss-map Jacobian is not positive at every vertex.
LTable build_L(const sphere::CmcSphereMesh& m);
LTable build_L(const gauss::GaussField& sphere_field, const std::vector<double>& jacobians);

struct LVerification {
  double ratio_max = 0.0;     // max |L/M| over samples
  double eqL_residual = 0.0;  // max over direct samples with |q| <= 1
  double decay_max = 0.0;     // max |q^4 L| = |phi| over dual samples with |w| <= kDecayRadius
  double decay_median = 0.0;
};
LVerification verify_L(const LTable& t);

struct QReport {
  std::vector<cplx> Q;
  std::vector<double> Qhat;  // |Q| / (|M(g)| |g_z|^2), chart independent
  double vanish_max = 0.0;   // max |Q|
  double vanish_rel_max = 0.0;  // max Qhat
  double cr_ratio_max = 0.0;    // max |Q_zbar| / |Q| where Qhat > noise floor (grid fields)
  int cr_samples = 0;
};
QReport Q_eval(const gauss::GaussField& f, const LTable& t, double noise_floor = 0.0);

nlohmann::json to_json(const LTable& t);
LTable table_from_json(const nlohmann::json& j);
void write_table(const LTable& t, const std::string& path);
LTable read_table(const std::string& path);

}  // namespace sol3::quad
