#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "pcascade/analytic/extended_real.hpp"
#include "pcascade/analytic/parameters.hpp"
#include "pcascade/error.hpp"

namespace pcascade {

/// phi_alpha(theta) = sin(pi (2 - alpha)) / sin(pi (theta - alpha)) on (alpha, alpha + 1),
/// +inf elsewhere.
inline ExtendedReal biggins_transform(const CascadeParameters& params, double theta) {
  const double a = params.alpha();
  if (!(theta > a && theta < a + 1.0)) return ExtendedReal::infinity();
  const double den = std::sin(std::numbers::pi * (theta - a));
  if (!(den > 0.0)) return ExtendedReal::infinity();
  return ExtendedReal(std::sin(std::numbers::pi * (2.0 - a)) / den);
}

/// Inverse of phi_alpha restricted to its decreasing branch (alpha, alpha + 1/2].
/// Accepts any y >= min phi = sin(pi (2 - alpha)); values above 1 map to theta
/// below the Malthusian parameter, which the nesting exponent needs for lambda < 0.
inline double biggins_inverse(const CascadeParameters& params, double y) {
  const double s = std::sin(std::numbers::pi * (2.0 - params.alpha()));
  if (!(y >= s) || !std::isfinite(y))
    throw DomainError("biggins_inverse: y must be at least the minimum sin(pi(2-alpha)) of phi");
  return params.alpha() + std::asin(s / y) / std::numbers::pi;
}

inline double malthusian_parameter(const CascadeParameters& params) { return params.malthusian(); }

/// Convex conjugate of log phi_alpha:
///   alpha x + (x/pi) arccot(-x/pi) - log(1 + x^2/pi^2)/2 - log sin(pi(2 - alpha)),
/// with arccot taking values in (0, pi).
inline double rate_function(const CascadeParameters& params, double x) {
  constexpr double pi = std::numbers::pi;
  const double arccot = pi / 2.0 - std::atan(-x / pi);
  return params.alpha() * x + (x / pi) * arccot - 0.5 * std::log1p(x * x / (pi * pi)) -
         std::log(std::sin(pi * (2.0 - params.alpha())));
}

struct LegendreResult {
  double value;
  double argmax;
};

/// sup over theta in [lo, hi] of theta x - f(theta), by golden-section search.
/// The objective is first sampled on a coarse grid; if those samples are not
/// unimodal the objective cannot be concave and NonConcaveError is thrown.
inline LegendreResult legendre_numeric(const std::function<double(double)>& f, double x, double lo,
                                       double hi, double theta_tol = 1e-10) {
  if (!(lo < hi)) throw DomainError("legendre_numeric: empty search interval");
  auto obj = [&](double t) { return t * x - f(t); };

  constexpr int kGrid = 64;
  std::vector<double> vals(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) vals[i] = obj(lo + (hi - lo) * i / kGrid);
  const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  const double slack = 1e-12 * (1.0 + std::fabs(vals[best]));
  for (int i = 1; i <= best; ++i)
    if (vals[i] < vals[i - 1] - slack) throw NonConcaveError("legendre_numeric: objective is not unimodal");
  for (int i = best + 1; i <= kGrid; ++i)
    if (vals[i] > vals[i - 1] + slack) throw NonConcaveError("legendre_numeric: objective is not unimodal");

  double a = lo + (hi - lo) * std::max(best - 1, 0) / kGrid;
  double b = lo + (hi - lo) * std::min(best + 1, kGrid) / kGrid;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = obj(c), fd = obj(d);
  while (b - a > theta_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = obj(d);
    }
  }
  const double t = 0.5 * (a + b);
  LegendreResult r{obj(t), t};
  // The sup may sit on the boundary of the search interval.
  if (vals[best] > r.value) r = {vals[best], lo + (hi - lo) * best / kGrid};
  return r;
}

}  // namespace pcascade
