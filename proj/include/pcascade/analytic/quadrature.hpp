#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "pcascade/error.hpp"

namespace pcascade {

/// Tolerances for the double-exponential quadrature used throughout.
///
/// Improper integrals over [0, inf) are mapped onto [0, 1) with
/// y = scale * t / (1 - t). The unit interval is split at t = 1/2 (y = scale),
/// so an integrable singularity at y = 0 and the slow algebraic decay at
/// infinity each sit at an endpoint, where tanh-sinh converges fastest.
struct QuadratureSpec {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  std::size_t max_refinements = 15;  // each refinement halves the step
  double half_line_scale = 1.0;
  bool throw_on_failure = true;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
    if (!(half_line_scale > 0.0)) throw DomainError("half-line scale must be positive");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  double l1 = 0.0;     // integral of |f|, used for the relative criterion
  std::size_t levels = 0;
};

namespace detail {

inline bool accepted(const QuadratureResult& r, const QuadratureSpec& spec) {
  return std::isfinite(r.value) && r.error <= std::max(spec.abs_tol, spec.rel_tol * r.l1);
}

inline QuadratureResult& merge(QuadratureResult& into, const QuadratureResult& part) {
  into.value += part.value;
  into.error += part.error;
  into.l1 += part.l1;
  into.levels = std::max(into.levels, part.levels);
  return into;
}

inline void enforce(const QuadratureResult& r, const QuadratureSpec& spec, const char* what) {
  if (spec.throw_on_failure && !accepted(r, spec)) throw QuadratureError(what, r.value, r.error);
}

}  // namespace detail

/// Integral of f over [a, b]. f is called as f(x, distance_to_nearest_endpoint)
/// so integrands can evaluate (b - x) or (x - a) without cancellation; the
/// distance is always non-negative.
template <class F>
QuadratureResult integrate_with_complement(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b)) throw DomainError("integrate: need a < b");
  boost::math::quadrature::tanh_sinh<double> ts(spec.max_refinements);
  QuadratureResult r;
  // Boost passes xc = a - x (negative) near the left end and b - x near the right.
  auto g = [&](double x, double xc) { return f(x, std::fabs(xc)); };
  r.value = ts.integrate(g, a, b, spec.rel_tol, &r.error, &r.l1, &r.levels);
  detail::enforce(r, spec, "integrate: tolerance not reached");
  return r;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  return integrate_with_complement([&](double x, double) { return f(x); }, a, b, spec);
}

/// Integral of f over [0, inf) via the substitution described on QuadratureSpec.
template <class F>
QuadratureResult integrate_half_line(F&& f, const QuadratureSpec& spec = {}) {
  spec.validate();
  const double s = spec.half_line_scale;
  QuadratureSpec inner = spec;
  inner.throw_on_failure = false;
  inner.rel_tol = 0.25 * spec.rel_tol;  // the two halves' error estimates add up

  // t in (0, 1/2]: y = s t/(1-t), dy = s dt/(1-t)^2.
  auto lower = [&](double t, double) {
    const double one_minus = 1.0 - t;
    const double y = s * t / one_minus;
    return f(y) * s / (one_minus * one_minus);
  };
  // t in [1/2, 1): near t = 1 use the exact complement 1 - t.
  auto upper = [&](double t, double tc) {
    const double one_minus = (t > 0.75) ? tc : 1.0 - t;
    if (one_minus <= 0.0) return 0.0;
    const double y = s * (1.0 - one_minus) / one_minus;
    if (!std::isfinite(y)) return 0.0;
    const double v = f(y) * s / (one_minus * one_minus);
    return std::isfinite(v) ? v : 0.0;
  };

  QuadratureResult total = integrate_with_complement(lower, 0.0, 0.5, inner);
  detail::merge(total, integrate_with_complement(upper, 0.5, 1.0, inner));
  detail::enforce(total, spec, "integrate_half_line: tolerance not reached");
  return total;
}

}  // namespace pcascade
