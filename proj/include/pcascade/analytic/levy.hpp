#pragma once

#include <cmath>
#include <numbers>

#include "pcascade/analytic/extended_real.hpp"
#include "pcascade/analytic/parameters.hpp"
#include "pcascade/analytic/quadrature.hpp"
#include "pcascade/error.hpp"

namespace pcascade {

namespace detail {
inline void check_jump_theta(const CascadeParameters& params, double theta) {
  if (!(theta > params.alpha() && theta < params.alpha() + 1.0))
    throw DomainError("stable jump moment: theta must lie in (alpha, alpha + 1)");
}
}  // namespace detail

/// int_0^inf x^theta / (1 + x) pi(dx) for the Levy measure pi(dx) = C x^{-alpha-1} dx / Gamma(-alpha)
/// of a spectrally positive alpha-stable process. Closed form
/// C pi / (Gamma(-alpha) sin(pi (theta - alpha))); +inf at the pole theta -> alpha.
inline ExtendedReal stable_jump_moment(const CascadeParameters& params, double theta) {
  detail::check_jump_theta(params, theta);
  const double s = std::sin(std::numbers::pi * (theta - params.alpha()));
  if (s < 1e-12) return ExtendedReal::infinity();
  return ExtendedReal(params.levy_scale() * std::numbers::pi / (std::tgamma(-params.alpha()) * s));
}

/// Same moment by direct quadrature of the Levy measure.
inline QuadratureResult stable_jump_moment_quadrature(const CascadeParameters& params, double theta,
                                                      const QuadratureSpec& quad = {}) {
  detail::check_jump_theta(params, theta);
  const double a = params.alpha();
  const double norm = params.levy_scale() / std::tgamma(-a);
  QuadratureResult r = integrate_half_line(
      [&](double x) { return x > 0.0 ? std::pow(x, theta - a - 1.0) / (1.0 + x) : 0.0; }, quad);
  r.value *= norm;
  r.error *= norm;
  r.l1 *= norm;
  return r;
}

/// E[1/tau] where tau is the hitting time of -1: C Gamma(1 + alpha).
inline double expected_inverse_tau(const CascadeParameters& params) {
  return params.levy_scale() * std::tgamma(1.0 + params.alpha());
}

/// int_0^inf exp(-lambda^{1/alpha}) d lambda, which equals Gamma(1 + alpha) (C = 1).
inline QuadratureResult expected_inverse_tau_quadrature(const CascadeParameters& params,
                                                        const QuadratureSpec& quad = {}) {
  const double a = params.alpha();
  QuadratureSpec q = quad;
  q.half_line_scale = std::pow(10.0, a);  // the bulk sits where lambda^{1/alpha} is order 10
  return integrate_half_line([&](double l) { return std::exp(-std::pow(l, 1.0 / a)); }, q);
}

/// c_alpha = sin(pi (alpha - 1)) / pi.
inline double c_alpha(const CascadeParameters& params) {
  return std::sin(std::numbers::pi * (params.alpha() - 1.0)) / std::numbers::pi;
}

}  // namespace pcascade
