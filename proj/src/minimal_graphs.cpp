#include "sol3/minimal_graphs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sol3/errors.hpp"

namespace sol3::minimal {

double residual(const Jet2& j, double x3) {
  const double ep = std::exp(2.0 * x3);
  const double em = std::exp(-2.0 * x3);
  return (ep * j.f3 * j.f3 + 1.0) * j.f22 - 2.0 * ep * j.f2 * j.f3 * j.f23 +
         (em + ep * j.f2 * j.f2) * j.f33 - (ep * j.f2 * j.f2 - em) * j.f3;
}

double residual(const GraphFn& g, double x2, double x3) { return residual(g.eval(x2, x3), x3); }

GraphFn entire_family(Family family, double a, double b) {
  GraphFn g;
  g.family = family;
  g.a = a;
  g.b = b;
  switch (family) {
    case Family::Affine:
      g.eval = [a, b](double x2, double) { return Jet2{a * x2 + b, a, 0.0, 0.0, 0.0, 0.0}; };
      break;
    case Family::Exp:
      g.eval = [a](double, double x3) {
        const double e = a * std::exp(-x3);
        return Jet2{e, 0.0, -e, 0.0, 0.0, e};
      };
      break;
    case Family::MixedExp:
      g.eval = [a](double x2, double x3) {
        const double e = a * std::exp(-x3);
        return Jet2{x2 * e, e, -x2 * e, 0.0, -e, x2 * e};
      };
      break;
    case Family::Exp2:
      g.eval = [](double x2, double x3) {
        const double e = std::exp(-2.0 * x3);
        return Jet2{x2 * e, e, -2.0 * x2 * e, 0.0, -2.0 * e, 4.0 * x2 * e};
      };
      break;
    case Family::Custom:
      throw NumericalError(ErrorKind::InvalidArgument, "custom graphs come from from_function");
  }
  return g;
}

Family parse_family(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "affine") return Family::Affine;
  if (s == "exp") return Family::Exp;
  if (s == "mixedexp") return Family::MixedExp;
  if (s == "exp2") return Family::Exp2;
  throw NumericalError(ErrorKind::InvalidArgument, "unknown graph family '" + name + "'");
}

std::string family_name(Family family) {
  switch (family) {
    case Family::Affine: return "affine";
    case Family::Exp: return "exp";
    case Family::MixedExp: return "mixedexp";
    case Family::Exp2: return "exp2";
    case Family::Custom: return "custom";
  }
  return "custom";
}

GraphFn from_function(std::function<double(double, double)> f, double h) {
  GraphFn g;
  g.family = Family::Custom;
  g.eval = [f = std::move(f), h](double x2, double x3) {
    const double c = f(x2, x3);
    const double p2 = f(x2 + h, x3), m2 = f(x2 - h, x3);
    const double p3 = f(x2, x3 + h), m3 = f(x2, x3 - h);
    Jet2 j;
    j.f = c;
    j.f2 = (p2 - m2) / (2.0 * h);
    j.f3 = (p3 - m3) / (2.0 * h);
    j.f22 = (p2 - 2.0 * c + m2) / (h * h);
    j.f33 = (p3 - 2.0 * c + m3) / (h * h);
    j.f23 = (f(x2 + h, x3 + h) - f(x2 + h, x3 - h) - f(x2 - h, x3 + h) + f(x2 - h, x3 - h)) /
            (4.0 * h * h);
    return j;
  };
  return g;
}

double derivative_consistency(const GraphFn& g, double x2, double x3, double h) {
  const Jet2 j = g.eval(x2, x3);
  const double d2 = (g.eval(x2 + h, x3).f - g.eval(x2 - h, x3).f) / (2.0 * h);
  const double d3 = (g.eval(x2, x3 + h).f - g.eval(x2, x3 - h).f) / (2.0 * h);
  const double d22 = (g.eval(x2 + h, x3).f2 - g.eval(x2 - h, x3).f2) / (2.0 * h);
  const double d33 = (g.eval(x2, x3 + h).f3 - g.eval(x2, x3 - h).f3) / (2.0 * h);
  const double d23 = (g.eval(x2, x3 + h).f2 - g.eval(x2, x3 - h).f2) / (2.0 * h);
  return std::max({std::abs(d2 - j.f2), std::abs(d3 - j.f3), std::abs(d22 - j.f22),
                   std::abs(d33 - j.f33), std::abs(d23 - j.f23)});
}

}  // namespace sol3::minimal
