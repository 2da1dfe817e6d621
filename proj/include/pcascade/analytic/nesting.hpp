#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcascade/analytic/extended_real.hpp"
#include "pcascade/analytic/parameters.hpp"
#include "pcascade/error.hpp"

namespace pcascade {

/// Cumulant of the nesting statistics:
///   kappa_alpha(lambda) = (arccos(n/2) - arccos((n/2) e^lambda)) / pi   for lambda <= log(2/n),
/// +inf beyond.
inline ExtendedReal nesting_kappa(const CascadeParameters& params, double lambda) {
  const double half_n = params.loop_weight() / 2.0;
  const double edge = std::log(1.0 / half_n);
  if (lambda > edge) return ExtendedReal::infinity();
  const double arg = std::min(half_n * std::exp(lambda), 1.0);
  return ExtendedReal((std::acos(half_n) - std::acos(arg)) / std::numbers::pi);
}

/// Large-deviation rate for the number of loops surrounding a marked vertex:
///   J(x) = x log((2/n) x / sqrt(1 + x^2)) + arccot(x) - arccos(n/2),  x > 0.
inline double nesting_rate_J(double n_loop, double x) {
  if (!(n_loop > 0.0 && n_loop < 2.0)) throw DomainError("nesting_rate_J: n must lie in (0,2)");
  if (!(x > 0.0)) throw DomainError("nesting_rate_J: x must be positive");
  return x * std::log((2.0 / n_loop) * x / std::hypot(1.0, x)) + std::atan(1.0 / x) - std::acos(n_loop / 2.0);
}

/// The CLE nesting function
///   psi_kappa(theta) = -cos(4 pi / kappa) / cos(pi sqrt((1 - 4/kappa)^2 - 8 theta / kappa)),
/// with cos(pi sqrt(-r)) read as cosh(pi sqrt(r)) when the radicand is negative.
inline double cle_psi_kappa(double kappa_cle, double theta) {
  if (!(kappa_cle > 0.0)) throw DomainError("cle_psi_kappa: kappa must be positive");
  const double b = 1.0 - 4.0 / kappa_cle;
  const double radicand = b * b - 8.0 * theta / kappa_cle;
  const double den = radicand >= 0.0 ? std::cos(std::numbers::pi * std::sqrt(radicand))
                                     : std::cosh(std::numbers::pi * std::sqrt(-radicand));
  if (std::fabs(den) < 1e-14) throw DomainError("cle_psi_kappa: theta sits on a pole (cosine zero)");
  return -std::cos(4.0 * std::numbers::pi / kappa_cle) / den;
}

}  // namespace pcascade
