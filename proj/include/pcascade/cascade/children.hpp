#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/offspring/law.hpp"
#include "pcascade/walk/batched.hpp"
#include "pcascade/walk/jumps.hpp"
#include "pcascade/walk/step_law.hpp"

namespace pcascade {

using ChildMultiset = JumpMultiset;

/// How the 1/(1 + L_p) bias of the first generation is realised.
enum class BiasStrategy {
  automatic,  // leaf_tilt for the built-in stable family, rejection otherwise
  rejection,  // accept an unbiased excursion with probability (p + 1)/(1 + L_p)
  leaf_tilt,  // exact mixture over tilted subcritical forests (stable family only)
};

// A draw that hits the step cap is redrawn, which conditions the law on small
// excursions. The batched sampler's cost grows with the number of generations,
// not with T, so the cap sits far above the biased excursion length (median
// ~4e8 vertices at alpha = 1.8, p = 1e5, tail ~ t^{-1-1/alpha}).
inline constexpr std::uint64_t kChildStepCap = 1'000'000'000'000'000ULL;

inline ForestOptions child_forest_defaults() {
  ForestOptions fo;
  fo.step_cap = kChildStepCap;
  return fo;
}

struct ChildSamplerOptions {
  BiasStrategy strategy = BiasStrategy::automatic;
  std::uint64_t retry_cap = 1'000'000;
  ForestOptions forest = child_forest_defaults();
};

struct ChildSample {
  std::uint64_t p = 0;
  ChildMultiset children;  // X_i + 1 over steps X_i >= 0, non-increasing
  std::uint64_t T = 0;
  std::uint64_t L = 0;
  std::uint64_t attempts = 0;
};

namespace detail {

/// w ~ Beta(alpha, p + 1), returned as (w, 1 - w) without cancellation.
template <class URBG>
std::pair<double, double> beta_alpha_p(double alpha, std::uint64_t p, URBG& g) {
  const double x = std::gamma_distribution<double>(alpha, 1.0)(g);
  const double y = std::gamma_distribution<double>(static_cast<double>(p) + 1.0, 1.0)(g);
  return {x / (x + y), y / (x + y)};
}

}  // namespace detail

/// Jump multiset of a skip-free excursion to -p, biased by 1/(1 + L_p).
///
/// rejection: run unbiased excursions and accept with probability (p+1)/(1+L_p);
///   the expected number of attempts grows like p^{alpha-1}.
/// leaf_tilt: writes 1/(1+L) = int_0^1 s^L ds. For g(s) = s + gamma (1-s)^alpha,
///   weighting a p-forest by s^L gives p i.i.d. trees with offspring law
///   nu(0) = gamma (1 - w^alpha)/(1 - w), nu(k) = mu(k) (1 - w)^{k-1}, where
///   s = 1 - w^alpha, and the mixing law of w is Beta(alpha, p + 1).
///   One attempt per sample, same law as rejection.
template <class URBG>
ChildSample sample_children(std::uint64_t p, const StepLaw& step, URBG& g, const ChildSamplerOptions& opt = {}) {
  if (p == 0) throw DomainError("sample_children: p must be positive");
  const OffspringLaw& law = step.offspring();
  BiasStrategy strategy = opt.strategy;
  if (strategy == BiasStrategy::automatic)
    strategy = law.stable_family() ? BiasStrategy::leaf_tilt : BiasStrategy::rejection;

  ChildSample out;
  out.p = p;
  if (strategy == BiasStrategy::leaf_tilt) {
    if (!law.stable_family()) throw DomainError("leaf_tilt sampling needs the built-in stable family");
    const double alpha = law.stable_family()->alpha;
    ForestOptions fo = opt.forest;
    fo.reject_below.reset();
    for (out.attempts = 1; out.attempts <= opt.retry_cap; ++out.attempts) {
      const auto [w, q] = detail::beta_alpha_p(alpha, p, g);
      const double s = -std::expm1(alpha * std::log(w));
      ForestDraw d = sample_forest(law, p, g, fo, ForestTilt::leaves(q, s));
      if (d.run.truncated) continue;
      out.children = std::move(d.run.jumps);
      out.T = d.run.T;
      out.L = d.run.L;
      return out;
    }
    throw SamplingError("sample_children: retry cap exhausted (every tilted forest hit the step cap)");
  }

  ForestOptions fo = opt.forest;
  const double P1 = static_cast<double>(p) + 1.0;
  for (out.attempts = 1; out.attempts <= opt.retry_cap; ++out.attempts) {
    const double u = uniform01(g);
    fo.reject_below = u;
    ForestDraw d = sample_forest(law, p, g, fo);
    if (d.rejected || d.run.truncated) continue;
    if (u < P1 / (1.0 + static_cast<double>(d.run.L))) {
      out.children = std::move(d.run.jumps);
      out.T = d.run.T;
      out.L = d.run.L;
      return out;
    }
  }
  throw SamplingError("sample_children: retry cap exhausted; is the step law critical?");
}

/// Discrete approximation of a draw from nu_alpha: the children of p_base
/// divided by p_base.
struct NuAlphaSample {
  ChildMultiset children;
  std::uint64_t p_base = 0;
  std::uint64_t attempts = 0;

  /// sum_i x_i^theta.
  double power_sum(double theta) const { return children.power_sum(theta, static_cast<double>(p_base)); }

  /// The entries x_i >= threshold, non-increasing.
  std::vector<double> normalized(double threshold = 0.0) const {
    const auto t = static_cast<std::uint64_t>(std::ceil(threshold * static_cast<double>(p_base)));
    std::vector<double> out;
    for (const auto& [v, c] : children.runs()) {
      if (v < t) break;
      out.insert(out.end(), c, static_cast<double>(v) / static_cast<double>(p_base));
    }
    return out;
  }

  double largest() const { return static_cast<double>(children.largest()) / static_cast<double>(p_base); }
};

template <class URBG>
NuAlphaSample nu_alpha_sample(std::uint64_t p_base, const StepLaw& step, URBG& g,
                              const ChildSamplerOptions& opt = {}) {
  ChildSample c = sample_children(p_base, step, g, opt);
  return NuAlphaSample{std::move(c.children), p_base, c.attempts};
}

}  // namespace pcascade
