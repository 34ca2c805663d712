#pragma once

// Graphs x1 = f(x2, x3) and the minimal-surface equation they satisfy:
//   (e^{2x3} f3^2 + 1) f22 - 2 e^{2x3} f2 f3 f23 + (e^{-2x3} + e^{2x3} f2^2) f33
//     - (e^{2x3} f2^2 - e^{-2x3}) f3 = 0.

#include <functional>
#include <string>

namespace sol3::minimal {

struct Jet2 {
  double f = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double f22 = 0.0;
  double f23 = 0.0;
  double f33 = 0.0;
};

enum class Family { Affine, Exp, MixedExp, Exp2, Custom };

struct GraphFn {
  Family family = Family::Custom;
  double a = 0.0;
  double b = 0.0;
  std::function<Jet2(double x2, double x3)> eval;
};

double residual(const Jet2& j, double x3);
double residual(const GraphFn& g, double x2, double x3);

/// x1 = a x2 + b, a e^{-x3}, a x2 e^{-x3}, x2 e^{-2x3} (Exp2 ignores a, b).
GraphFn entire_family(Family family, double a = 1.0, double b = 0.0);
/// Accepts "affine", "exp", "mixedexp", "exp2". Throws InvalidArgument otherwise.
Family parse_family(const std::string& name);
std::string family_name(Family family);

/// Wraps a plain function with centered finite-difference derivatives.
GraphFn from_function(std::function<double(double, double)> f, double h = 1e-4);

/// Max discrepancy between the supplied first derivatives and centered
/// differences at (x2, x3); O(h^2) for a consistent evaluator.
double derivative_consistency(const GraphFn& g, double x2, double x3, double h);

}  // namespace sol3::minimal
