#pragma once

#include <algorithm>
#include <cmath>

#include "pcascade/analytic/parameters.hpp"
#include "pcascade/analytic/quadrature.hpp"
#include "pcascade/analytic/special.hpp"
#include "pcascade/error.hpp"

namespace pcascade {

namespace detail {

// Order nu = alpha - 1/2 is close to 1 only near the critical alpha = 3/2, where
// Gamma(1 - nu) blows up and the series form cancels catastrophically.
inline bool near_integer_order(double nu) { return std::fabs(nu - 1.0) < 1e-3; }

// Splits the series for psi_{alpha,2}(u), u = w^2, into
//   psi = Gamma(1-nu) (1/Gamma(1-nu) + A - B)
// with A = sum_{n>=1} u^n / (n! Gamma(n+1-nu)) and B = sum_{n>=0} u^{n+nu} / (n! Gamma(n+nu+1)).
// Keeping the leading 1 separate lets 1 - psi be formed without cancellation.
struct PsiSeries {
  double a_tail;
  double b_total;
};

inline PsiSeries psi_series(double nu, double u) {
  const long double lu = u, lnu = nu;
  long double a = 1.0L / std::tgamma(1.0L - lnu);
  long double b = std::pow(lu, lnu) / std::tgamma(1.0L + lnu);
  long double a_tail = 0.0L, b_total = b;
  for (int n = 1; n < 500; ++n) {
    a *= lu / (n * (n - lnu));
    b *= lu / (n * (n + lnu));
    a_tail += a;
    b_total += b;
    if (n > lu && std::fabs(a) + std::fabs(b) < 1e-19L * (std::fabs(a_tail) + std::fabs(b_total) + 1e-300L))
      break;
  }
  return {static_cast<double>(a_tail), static_cast<double>(b_total)};
}

// Beyond this Bessel argument psi_{alpha,theta} is below e^{-1000} and returned as 0.
inline constexpr double kPsiUnderflowArgument = 1400.0;

// psi_{alpha,2}(w^2) for w > 0.
inline double psi_at_root(double nu, double w) {
  if (2.0 * w > kPsiUnderflowArgument) return 0.0;
  if (2.0 * w <= kBesselSeriesCutoff && !near_integer_order(nu)) {
    const PsiSeries s = psi_series(nu, w * w);
    return 1.0 + std::tgamma(1.0 - nu) * (s.a_tail - s.b_total);
  }
  const double k = near_integer_order(nu) ? bessel_k_integral(nu, 2.0 * w) : bessel_k(nu, 2.0 * w);
  return 2.0 / std::tgamma(nu) * std::pow(w, nu) * k;
}

inline double psi_complement_at_root(double nu, double w) {
  if (2.0 * w <= kBesselSeriesCutoff && !near_integer_order(nu)) {
    const PsiSeries s = psi_series(nu, w * w);
    return -std::tgamma(1.0 - nu) * (s.a_tail - s.b_total);
  }
  return 1.0 - psi_at_root(nu, w);
}

}  // namespace detail

/// psi_{alpha,theta}(x) = 2/Gamma(alpha - 1/2) x^{(alpha-1/2)/theta} K_{alpha-1/2}(2 x^{1/theta}),
/// a Laplace transform, so psi(0) = 1 and psi decreases on [0, inf).
inline double psi(const CascadeParameters& params, double theta, double x) {
  if (!(theta > 0.0)) throw DomainError("psi: theta must be positive");
  if (!(x >= 0.0)) throw DomainError("psi: x must be non-negative");
  if (x == 0.0) return 1.0;
  const double nu = params.bessel_order();
  const double w = std::pow(x, 1.0 / theta);
  if (2.0 * w > detail::kPsiUnderflowArgument) return 0.0;
  if (2.0 * w <= kBesselSeriesCutoff && !detail::near_integer_order(nu)) {
    const detail::PsiSeries s = detail::psi_series(nu, w * w);
    return 1.0 + std::tgamma(1.0 - nu) * (s.a_tail - s.b_total);
  }
  // Written exactly as the defining formula, x^{nu/theta} K_nu(2 x^{1/theta}).
  const double k = detail::near_integer_order(nu) ? bessel_k_integral(nu, 2.0 * w) : bessel_k(nu, 2.0 * w);
  return 2.0 / std::tgamma(nu) * std::pow(x, nu / theta) * k;
}

/// 1 - psi_{alpha,theta}(x), accurate for tiny x where psi rounds to 1.
inline double psi_complement(const CascadeParameters& params, double theta, double x) {
  if (!(theta > 0.0)) throw DomainError("psi_complement: theta must be positive");
  if (!(x >= 0.0)) throw DomainError("psi_complement: x must be non-negative");
  if (x == 0.0) return 0.0;
  return detail::psi_complement_at_root(params.bessel_order(), std::pow(x, 1.0 / theta));
}

namespace detail {

struct MalthusianScaling {
  double theta;
  double factor;
};

inline MalthusianScaling malthusian_scaling(const CascadeParameters& params) {
  if (params.is_critical()) throw DomainError("the Malthusian limit law is not defined at alpha = 3/2");
  const double a = params.alpha();
  if (params.phase() == Phase::dilute) return {2.0, a - 1.5};
  return {2.0 * a - 1.0, std::tgamma(a + 0.5) / std::tgamma(1.5 - a)};
}

}  // namespace detail

/// Laplace transform E[exp(-x W)] of the limit of the Malthusian martingale.
/// Dilute: psi_{alpha,2}((alpha - 3/2) x), an inverse-Gamma(alpha - 1/2, alpha - 3/2) law.
/// Dense:  psi_{alpha,2alpha-1}(Gamma(alpha + 1/2)/Gamma(3/2 - alpha) x).
inline double malthusian_limit_laplace(const CascadeParameters& params, double x) {
  const auto s = detail::malthusian_scaling(params);
  return psi(params, s.theta, s.factor * x);
}

inline double malthusian_limit_laplace_complement(const CascadeParameters& params, double x) {
  const auto s = detail::malthusian_scaling(params);
  return psi_complement(params, s.theta, s.factor * x);
}

namespace detail {

// (e^{-t} - 1 + t) / t^2, without cancellation for small t.
inline double exp_remainder2_scaled(double t) {
  if (std::fabs(t) < 1e-2) {
    double term = 0.5, sum = 0.0;
    for (int k = 3; k < 12; ++k) {
      sum += term;
      term *= -t / k;
    }
    return sum;
  }
  return (std::expm1(-t) + t) / (t * t);
}

}  // namespace detail

/// kappa_{psi,x}(lambda) = int_0^inf (e^{-lambda y} psi_{alpha,1}(x y) - 1 + lambda y) y^{-alpha-1} dy.
/// The integrand behaves like y^{1-alpha} or y^{alpha-2} at 0 and like y^{-alpha} at infinity.
inline QuadratureResult cumulant_kappa_psi(const CascadeParameters& params, double x, double lambda,
                                           QuadratureSpec quad = {}) {
  if (!(x > 0.0)) throw DomainError("cumulant_kappa_psi: x must be positive");
  if (!(lambda >= 0.0)) throw DomainError("cumulant_kappa_psi: lambda must be non-negative");
  const double a = params.alpha();
  auto f = [&](double y) {
    if (y < 1e-300) return 0.0;
    // Factor y^2 out of the bracket so tiny y neither underflows nor overflows.
    const double t = lambda * y;
    const double comp = psi_complement(params, 1.0, x * y);
    const double body = lambda * lambda * detail::exp_remainder2_scaled(t) - std::exp(-t) * (comp / y) / y;
    return body * std::pow(y, 1.0 - a);
  };
  quad.half_line_scale = 1.0 / std::max(lambda, x);
  return integrate_half_line(f, quad);
}

}  // namespace pcascade
