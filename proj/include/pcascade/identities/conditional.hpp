#pragma once

// Conditional (Rao-Blackwellised) Monte Carlo for the built-in stable family
// g(s) = s + gamma (1 - s)^alpha.
//
// The first generation of a p-cascade is the jump multiset of an excursion
// biased by 1/(1 + L_p). Writing 1/(1 + L) = int_0^1 s^L ds, with s = 1 - w^alpha,
// turns the biased excursion into a Beta(alpha, p + 1) mixture of subcritical
// forests (see sample_children). Given w, Wald's identity gives the forest's
// expected jump sum in closed form:
//
//   E[sum_i f(child_i) | w] = p S_f(1 - w) / (gamma alpha w^{alpha - 1}),
//   S_f(q) = sum_{k >= 1} mu(k) q^{k-1} f(k).
//
// Averaging over w is the expectation we want, but w^{1 - alpha} times the
// heavy sum S_f makes the plain mixture variance infinite. Drawing w from
// Beta(1 + alpha - theta, p + 1) instead and reweighting cancels the singular
// power exactly, so every replicate below is bounded near w = 0.
//
// Similarly 1/T = int_0^inf e^{-lambda T} d lambda gives, after the change of
// variables e^lambda = 1 + gamma t^alpha / (1 - t),
//
//   E[(1/T) sum_i f(child_i)] = int_0^1 (1 - t)^p p S_f(1 - t) / (1 - t + gamma t^alpha) dt.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pcascade/error.hpp"
#include "pcascade/offspring/law.hpp"

namespace pcascade {

/// S(w) = sum_{k >= 1} mu(k) k^theta (1 - w)^{k-1} and related series for one
/// (stable law, theta) pair. Terms up to `head` are summed exactly; beyond it
/// mu(k) is replaced by its asymptote c k^{-alpha-1}, c = gamma / Gamma(-alpha),
/// and the sum by an integral from head + 1/2 (relative error O(1/head) on the
/// tail only).
class PowerSeries {
 public:
  static constexpr std::size_t kDefaultHead = 20'000;

  PowerSeries(const OffspringLaw& law, double theta, std::size_t head = kDefaultHead) : theta_(theta) {
    if (!law.stable_family()) throw DomainError("PowerSeries: needs the built-in stable family");
    alpha_ = law.stable_family()->alpha;
    gamma_ = law.stable_family()->gamma;
    if (!(theta > alpha_ && theta < alpha_ + 1.0))
      throw DomainError("PowerSeries: theta must lie in (alpha, alpha + 1)");
    s_ = theta - alpha_;
    c_ = gamma_ / std::tgamma(-alpha_);
    head = std::max<std::size_t>(head, 16);
    a_.assign(head + 1, 0.0);
    for (std::size_t k = 1; k <= head; ++k) a_[k] = law.pmf(k) * std::pow(static_cast<double>(k), theta);
    edge_ = static_cast<double>(head) + 0.5;
  }

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double theta() const { return theta_; }
  std::size_t head() const { return a_.size() - 1; }

  /// sum_k mu(k) k^theta (1 - w)^{k-1}, for w in (0, 1].
  double at(double w) const {
    if (!(w > 0.0 && w <= 1.0)) throw DomainError("PowerSeries::at: w must lie in (0, 1], got " + std::to_string(w));
    if (w == 1.0) return a_[1];
    const double q = 1.0 - w;
    const double lambda = -std::log1p(-w);
    const std::size_t stop = stop_index(lambda);
    long double sum = 0.0L;
    double qp = 1.0;
    for (std::size_t k = 1; k <= stop; ++k) {
      sum += a_[k] * qp;
      qp *= q;
    }
    if (stop == head()) sum += tail_at(lambda, q);
    return static_cast<double>(sum);
  }

  /// sum_k mu(k) k^theta / (x + k), for x > 0.
  double resolvent(double x) const {
    if (!(x > 0.0)) throw DomainError("PowerSeries::resolvent: x must be positive");
    long double sum = 0.0L;
    for (std::size_t k = 1; k <= head(); ++k) sum += a_[k] / (x + static_cast<double>(k));
    // c int_A^inf y^{s-1}/(x + y) dy = c x^{s-1} B(s, 1-s) I_{1-u}(1-s, s), u = A/(x + A).
    const double u = edge_ / (x + edge_);
    const double full = std::numbers::pi / std::sin(std::numbers::pi * s_);
    sum += c_ * std::pow(x, s_ - 1.0) * full * boost::math::ibetac(s_, 1.0 - s_, u);
    return static_cast<double>(sum);
  }

  /// k drawn with probability proportional to mu(k) k^theta (1 - w)^{k-1}.
  template <class URBG>
  std::uint64_t sample_index(double w, URBG& g) const {
    const double q = 1.0 - w;
    const double lambda = w < 1.0 ? -std::log1p(-w) : std::numeric_limits<double>::infinity();
    const std::size_t stop = w < 1.0 ? stop_index(lambda) : 1;
    const double tail = (w < 1.0 && stop == head()) ? tail_at(lambda, q) : 0.0;
    double head_sum = 0.0, qp = 1.0;
    for (std::size_t k = 1; k <= stop; ++k, qp *= q) head_sum += a_[k] * qp;
    double u = uniform01(g) * (head_sum + tail);
    if (u < head_sum) {
      qp = 1.0;
      for (std::size_t k = 1; k <= stop; ++k, qp *= q) {
        u -= a_[k] * qp;
        if (u < 0.0) return k;
      }
      return stop;
    }
    // Tail: lambda y is Gamma(s) conditioned to exceed lambda A.
    const double upper = boost::math::gamma_q(s_, lambda * edge_);
    double v = uniform01(g);
    if (v == 0.0) v = 0x1.0p-53;
    const double y = boost::math::gamma_q_inv(s_, v * upper) / lambda;
    return static_cast<std::uint64_t>(std::max(edge_, std::floor(y + 0.5)));
  }

 private:
  std::size_t stop_index(double lambda) const {
    const double k = 45.0 / lambda + 1.0;  // (1 - w)^{k-1} < e^{-45} beyond
    return k >= static_cast<double>(head()) ? head() : static_cast<std::size_t>(k);
  }

  // c sum_{k > head} k^{s-1} q^{k-1} ~ (c/q) int_A^inf y^{s-1} e^{-lambda y} dy.
  double tail_at(double lambda, double q) const {
    return c_ / q * std::pow(lambda, -s_) * boost::math::tgamma(s_, lambda * edge_);
  }

  double alpha_ = 0.0, gamma_ = 0.0, theta_ = 0.0, s_ = 0.0, c_ = 0.0, edge_ = 0.0;
  std::vector<double> a_;
};

namespace detail {

/// Beta(a, b) draw as (w, 1 - w) from two gamma variates.
template <class URBG>
std::pair<double, double> beta_pair(double a, double b, URBG& g) {
  const double x = std::gamma_distribution<double>(a, 1.0)(g);
  const double y = std::gamma_distribution<double>(b, 1.0)(g);
  return {x / (x + y), y / (x + y)};
}

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace detail

/// Exact E[sum_i (child_i/p)^theta] over the first generation of a p-cascade:
///   p^{1-theta} / (gamma alpha B(alpha, p + 1)) sum_k mu(k) k^theta / (p + k).
inline double biggins_first_generation_exact(const PowerSeries& S, std::uint64_t p) {
  const double P = static_cast<double>(p), a = S.alpha();
  return std::exp((1.0 - S.theta()) * std::log(P) - detail::log_beta(a, P + 1.0)) / (S.gamma() * a) *
         S.resolvent(P);
}

/// One importance-weighted conditional replicate of E[sum_i (child_i/p)^theta].
template <class URBG>
double biggins_first_generation_replicate(const PowerSeries& S, std::uint64_t p, URBG& g) {
  const double a = S.alpha(), th = S.theta(), P = static_cast<double>(p);
  const double ap = 1.0 + a - th;
  const auto [w, q] = detail::beta_pair(ap, P + 1.0, g);
  (void)q;
  if (w <= 0.0) return 0.0;
  // weight * conditional mean, with the w powers collected into w^{1 - ap}
  const double lead = std::exp(detail::log_beta(ap, P + 1.0) - detail::log_beta(a, P + 1.0) + (1.0 - th) * std::log(P));
  return lead / (S.gamma() * a) * S.at(w) * std::pow(w, 1.0 - ap);
}

/// One nested replicate of E[sum_{|u| = 2} (chi(u)/p)^theta]: the first
/// generation is integrated out given w, one child k is drawn in proportion to
/// its share of the conditional sum, and the second generation below k is
/// replaced by one replicate of its own conditional estimator.
template <class URBG>
double biggins_second_generation_replicate(const PowerSeries& S, std::uint64_t p, URBG& g) {
  const double a = S.alpha(), th = S.theta(), P = static_cast<double>(p);
  const double ap = 1.0 + a - th;
  const auto [w, q] = detail::beta_pair(ap, P + 1.0, g);
  (void)q;
  if (w <= 0.0) return 0.0;
  const double lead = std::exp(detail::log_beta(ap, P + 1.0) - detail::log_beta(a, P + 1.0) + (1.0 - th) * std::log(P));
  const double outer = lead / (S.gamma() * a) * S.at(w) * std::pow(w, 1.0 - ap);
  const std::uint64_t k = S.sample_index(w, g);
  return outer * biggins_first_generation_replicate(S, k, g);
}

/// Integrand pieces for the e^{-lambda T} representation at t in (0, 1).
struct LevyTerms {
  double jumps;    // p^alpha (1/T) sum_i (child_i/p)^theta contribution
  double inverse;  // p^alpha (1/T) contribution
};

/// One replicate of (p^alpha E[(1/T_p) sum_i (child_i/p)^theta], p^alpha E[1/T_p])
/// for an unbiased excursion, t drawn from Beta(1 + alpha - theta, p + 1).
template <class URBG>
LevyTerms levy_replicate(const PowerSeries& S, std::uint64_t p, URBG& g) {
  const double a = S.alpha(), th = S.theta(), ga = S.gamma(), P = static_cast<double>(p);
  const double ap = 1.0 + a - th;
  const auto [t, r] = detail::beta_pair(ap, P + 1.0, g);
  if (t <= 0.0) return {0.0, 0.0};
  const double lead = std::exp(detail::log_beta(ap, P + 1.0) + a * std::log(P));
  const double denom = r + ga * std::pow(t, a);
  const double jumps = lead * std::exp((1.0 - th) * std::log(P)) * S.at(t) * std::pow(t, 1.0 - ap) / denom;
  // d lambda / dt = gamma t^{alpha-1} (alpha + t/(1-t)) / (1 - t + gamma t^alpha)
  const double inverse = lead * ga * std::pow(t, a - ap) * (a + t / r) / denom;
  return {jumps, inverse};
}

/// p^alpha E[(1/T_p) sum_i (child_i/p)^theta] by quadrature of the same
/// representation (t = u^{1/a'} removes the endpoint singularity).
inline double levy_jump_moment_exact(const PowerSeries& S, std::uint64_t p) {
  const double a = S.alpha(), th = S.theta(), ga = S.gamma(), P = static_cast<double>(p);
  const double ap = 1.0 + a - th;
  auto f = [&](double u) {
    const double t = std::pow(u, 1.0 / ap);
    if (t <= 0.0 || t >= 1.0) return 0.0;
    // dt = t^{1 - ap} du / ap
    return std::exp(P * std::log1p(-t)) * S.at(t) * std::pow(t, 1.0 - ap) / (ap * (1.0 - t + ga * std::pow(t, a)));
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  // The integrand lives on u < (a few / p)^{a'}; split there so tanh-sinh sees the bulk.
  const double cut = std::min(0.5, std::pow(40.0 / P, ap));
  const double lo = ts.integrate(f, 0.0, cut, 1e-10);
  const double hi = ts.integrate(f, cut, 1.0, 1e-10);
  return std::exp((a + 1.0 - th) * std::log(P)) * (lo + hi);
}

}  // namespace pcascade
