#pragma once

// CMC H surfaces invariant under x2-translations. In (t, v) coordinates
//   x1 = -1/(2H) int_0^t e^{-cos s/(2H)} cos s ds,  x2 = -e^{1/(2H)} v / H,  x3 = cos t / (2H),
// and the Gauss map g = cot(t/2) solves g_u = (1 + g^2) exp(1/(H(1 + g^2))) in
// the conformal parameter u.

#include <string>
#include <vector>

#include "sol3/core.hpp"
#include "sol3/gauss_map.hpp"

namespace sol3::cylinder {

struct ProfileSample {
  double t = 0.0;
  double x1 = 0.0;
  double x3 = 0.0;
};

struct ProfileCurve {
  double H = 0.0;
  std::vector<ProfileSample> samples;  // t from -pi/2 to 3pi/2
  /// x1(3pi/2) - x1(-pi/2); the curve does not close up.
  double loop_gap = 0.0;
};

/// x1(t) by composite 10-point Gauss-Legendre on panels of width <= pi/16.
double x1_of_t(double H, double t);

ProfileCurve profile(double H, int n);

/// int_{-pi/2}^{3pi/2} e^{-cos t/(2H)} cos t dt (negative for every H > 0).
double embedding_defect(double H);

Point parametrize(double H, double t, double v);

/// u-length of one period of t, pi e^{-1/(2H)} I0(1/(2H)).
double period_u(double H);

struct CylinderGaussOptions {
  int nv = 5;
  int substeps = 8;  // RK4 steps per grid spacing
};

/// u at which t = 3pi/2, negated (u = 0 is where g = 1, i.e. t = pi/2).
double u_offset(double H);

/// Gauss map over one period: nu samples of u from -u_offset(H) (t = 3pi/2)
/// to P - u_offset(H) (t = -pi/2), times nv samples of v centered at 0 with dv = du.
gauss::GaussField gauss_of_cylinder(double H, int nu, const CylinderGaussOptions& opts = {});

/// t per u-index of a field from gauss_of_cylinder, decreasing from 3pi/2.
std::vector<double> t_values(const gauss::GaussField& f);

void write_profile_csv(const ProfileCurve& c, const std::string& path);

}  // namespace sol3::cylinder
