#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pcascade/analytic/quadrature.hpp"
#include "pcascade/error.hpp"

namespace pcascade {

// Above this argument the power series for K_nu loses too many digits to
// cancellation (its terms grow like I_nu(z) while K_nu decays like e^{-z}).
inline constexpr double kBesselSeriesCutoff = 10.0;

namespace detail {

inline void check_bessel_args(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("bessel_k: z must be positive");
  if (!std::isfinite(nu) || nu == std::round(nu))
    throw DomainError("bessel_k: the order must be a non-integer real");
}

// Sum over n of (1/n!) [ w^{2n} / Gamma(n - nu + 1) - w^{2n + 2 nu} / Gamma(n + nu + 1) ].
// Multiplying by Gamma(nu) Gamma(1 - nu) / 2 * w^{-nu} gives K_nu(2w).
// Accumulated in long double: near z = 10 the terms exceed the result by ~1e8.
inline double bessel_bracket_series(double nu, double w) {
  const long double w2 = static_cast<long double>(w) * w;
  const long double lnu = nu;
  long double a = 1.0L / std::tgamma(1.0L - lnu);                               // n = 0, first family
  long double b = std::pow(static_cast<long double>(w), 2.0L * lnu) / std::tgamma(1.0L + lnu);  // n = 0, second family
  long double sum = a - b;
  for (int n = 1; n < 500; ++n) {
    a *= w2 / (n * (n - lnu));
    b *= w2 / (n * (n + lnu));
    sum += a - b;
    // Stop once past the largest term and the new terms are below 1e-16 relative.
    if (n > w2 && std::fabs(a) + std::fabs(b) < 1e-16L * std::max(std::fabs(sum), 1e-300L)) break;
  }
  return static_cast<double>(sum);
}

}  // namespace detail

/// K_nu(z) from the integral representation int_0^inf e^{-z cosh t} cosh(nu t) dt.
/// Defined for every real order; used for large z and as an independent check.
inline double bessel_k_integral(double nu, double z, const QuadratureSpec& spec = {}) {
  if (!(z > 0.0)) throw DomainError("bessel_k_integral: z must be positive");
  // e^{-z cosh t} = e^{-z} e^{-z (cosh t - 1)}; beyond t_max the integrand is below e^{-745}.
  const double t_max = std::acosh(1.0 + 745.0 / z) + 1.0;
  auto f = [&](double t) {
    const double decay = -z * (std::cosh(t) - 1.0) + std::fabs(nu) * t;
    return 0.5 * (std::exp(decay) + std::exp(decay - 2.0 * std::fabs(nu) * t));
  };
  QuadratureSpec s = spec;
  s.rel_tol = std::min(spec.rel_tol, 1e-13);
  return std::exp(-z) * integrate(f, 0.0, t_max, s).value;
}

/// Modified Bessel function of the second kind K_nu(z), non-integer nu, z > 0.
/// Power series up to z = 10, integral representation beyond.
inline double bessel_k(double nu, double z) {
  detail::check_bessel_args(nu, z);
  if (z > kBesselSeriesCutoff) return bessel_k_integral(nu, z);
  const double w = 0.5 * z;
  const double reflection = std::numbers::pi / std::sin(std::numbers::pi * nu);  // Gamma(nu) Gamma(1-nu)
  return 0.5 * reflection * std::pow(w, -nu) * detail::bessel_bracket_series(nu, w);
}

}  // namespace pcascade
