#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pcascade/error.hpp"

namespace pcascade {

/// Weights ghat_k = binom(2k-1, k-1) g_k, k >= 1, of a Boltzmann map, with
/// generating series phi_g(x) = sum_k ghat_k x^k.
///
/// Either an explicit finite list (zero beyond its last entry) or a callable
/// together with its radius of convergence and a truncation point for the
/// series (terms beyond it are treated as negligible).
class WeightSequence {
 public:
  /// entries[k-1] = ghat_k.
  static WeightSequence from_list(std::vector<double> entries) {
    for (double v : entries)
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("weight entries must be finite and non-negative");
    WeightSequence w;
    w.list_ = std::move(entries);
    while (!w.list_.empty() && w.list_.back() == 0.0) w.list_.pop_back();
    w.radius_ = std::numeric_limits<double>::infinity();
    return w;
  }

  static WeightSequence from_map(const std::map<std::size_t, double>& entries) {
    std::vector<double> v;
    for (const auto& [k, value] : entries) {
      if (k == 0) throw DomainError("weights are indexed from k = 1");
      if (v.size() < k) v.resize(k, 0.0);
      v[k - 1] = value;
    }
    return from_list(std::move(v));
  }

  static WeightSequence from_callable(std::function<double(std::size_t)> ghat, double radius,
                                      double tail_exponent, std::size_t series_terms = 1'000'000) {
    if (!(radius > 0.0)) throw DomainError("radius of convergence must be positive");
    WeightSequence w;
    w.callable_ = std::move(ghat);
    w.radius_ = radius;
    w.tail_exponent_ = tail_exponent;
    w.series_terms_ = series_terms;
    return w;
  }

  double entry(std::size_t k) const {
    if (k == 0) return 0.0;
    if (callable_) return callable_(k);
    return k <= list_.size() ? list_[k - 1] : 0.0;
  }

  bool is_finite_list() const { return !callable_; }
  std::size_t list_size() const { return list_.size(); }
  std::size_t last_index() const { return callable_ ? series_terms_ : list_.size(); }
  double radius() const { return radius_; }
  double tail_exponent() const { return tail_exponent_; }

  /// phi_g(x) and phi_g'(x) for 0 <= x <= radius.
  double phi(double x) const { return series(x, false); }
  double phi_prime(double x) const { return series(x, true); }

 private:
  double series(double x, bool derivative) const {
    double sum = 0.0, c = 0.0;  // Kahan
    const std::size_t n = last_index();
    double xpow = derivative ? 1.0 : x;  // x^{k-1} or x^k
    for (std::size_t k = 1; k <= n; ++k) {
      const double term = entry(k) * xpow * (derivative ? static_cast<double>(k) : 1.0);
      const double y = term - c;
      const double t = sum + y;
      c = (t - sum) - y;
      sum = t;
      xpow *= x;
      if (!std::isfinite(xpow) || !std::isfinite(sum)) return std::numeric_limits<double>::infinity();
    }
    return sum;
  }

  std::vector<double> list_;
  std::function<double(std::size_t)> callable_;
  double radius_ = std::numeric_limits<double>::infinity();
  double tail_exponent_ = 0.0;
  std::size_t series_terms_ = 0;
};

struct AdmissibilityRoot {
  double z;
  bool tangent;  // double root: the sequence sits on the critical boundary
};

/// Smallest root Z_g >= 1 of phi_g(x) = x - 1.
///
/// F(x) = phi_g(x) - x + 1 is convex with F(1) = phi_g(1) >= 0. We locate the
/// minimiser of F by bisection on F', declare tangency when the minimum is
/// zero to rounding, and otherwise bisect for the sign change on [1, x_min].
inline AdmissibilityRoot solve_admissibility(const WeightSequence& w, double rel_tol = 1e-12) {
  auto F = [&](double x) { return w.phi(x) - x + 1.0; };
  auto dF = [&](double x) { return w.phi_prime(x) - 1.0; };

  const double f1 = F(1.0);
  if (f1 == 0.0) return {1.0, false};  // all weights zero

  const double cap = std::isfinite(w.radius()) ? w.radius() : 1e12;
  auto bisect_root = [&](double lo, double hi) {
    // F(lo) > 0 > F(hi)
    while (hi - lo > rel_tol * 0.25 * hi) {
      const double mid = 0.5 * (lo + hi);
      (F(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  if (dF(1.0) >= 0.0) throw NotAdmissible("phi_g(x) > x - 1 for every x >= 1 (F increasing from F(1) > 0)");

  // Grow the bracket until F turns negative or starts increasing.
  double lo = 1.0, hi = std::min(2.0, cap);
  while (hi < cap && F(hi) > 0.0 && dF(hi) < 0.0) {
    lo = hi;
    hi = std::min(2.0 * hi, cap);
  }
  const double fhi = F(hi);
  if (fhi < 0.0) return {bisect_root(lo, hi), false};
  if (fhi == 0.0 && dF(hi) < 0.0) return {hi, false};  // landed exactly on a simple root
  if (dF(hi) < 0.0) throw NotAdmissible("no root of phi_g(x) = x - 1 inside the radius of convergence");

  // Minimiser of F lies in [lo, hi].
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    const double mid = 0.5 * (a + b);
    (dF(mid) < 0.0 ? a : b) = mid;
  }
  const double xmin = 0.5 * (a + b);
  const double fmin = F(xmin);
  const double tangency_tol = 1e-12 * (1.0 + xmin);
  if (std::fabs(fmin) <= tangency_tol) return {xmin, true};
  if (fmin > 0.0) throw NotAdmissible("phi_g(x) > x - 1 for every x in the convergence domain");
  return {bisect_root(1.0, xmin), false};
}

/// Reads "k value" lines; blank lines and lines starting with '#' are skipped.
/// Indices not listed have ghat_k = 0.
inline WeightSequence load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight file " + path);
  std::map<std::size_t, double> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    long long k;
    double v;
    if (!(ss >> k >> v) || k < 1)
      throw DomainError("weight file " + path + ":" + std::to_string(lineno) + ": expected 'k value' with k >= 1");
    entries[static_cast<std::size_t>(k)] = v;
  }
  return WeightSequence::from_map(entries);
}

}  // namespace pcascade
