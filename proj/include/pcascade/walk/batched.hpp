#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/offspring/law.hpp"
#include "pcascade/walk/jumps.hpp"
#include "pcascade/walk/run.hpp"

namespace pcascade {

/// Geometric tilt of an offspring law:
///   nu(0) = mu(0) * leaf,   nu(k) = scale * mu(k) q^{k-1} (k >= 1).
/// The caller picks (q, leaf, scale) so that nu is a probability law.
///
/// leaves(q, s): weight s^L, with q = mu(0) s + sum_{k>=1} mu(k) q^k. A forest
///   of p nu-trees has the law of a mu-forest reweighted by s^L / q^p.
/// vertices(r, lambda): weight e^{-lambda T}, with r = e^{-lambda} g(r) the
///   Laplace transform of one tree size. Reweighting factor e^{-lambda T} / r^p.
struct ForestTilt {
  double q;
  double leaf;
  double scale;

  static ForestTilt leaves(double q, double s) { return {q, s / q, 1.0}; }
  static ForestTilt vertices(double r, double lambda) {
    const double e = std::exp(-lambda);
    return {r, e / r, e};
  }
};

struct ForestOptions {
  std::uint64_t step_cap = kDefaultStepCap;
  std::size_t dense_limit = 32;  // offspring values 0..dense_limit are split off by binomials
  // If set, abort as soon as (p + 1) / (1 + L + Q) < reject_below, Q the open vertices.
  // Every open vertex still owns at least one leaf, so the final acceptance
  // probability (p + 1) / (1 + L_p) is already known to fall below it.
  std::optional<double> reject_below;
  // Jumps above this value are recorded as this value. Keeps memory bounded
  // for statistics that saturate (min(x/p, 1)^theta and the like).
  std::uint64_t record_cap = std::numeric_limits<std::uint64_t>::max();
};

struct ForestDraw {
  WalkRun run;
  bool rejected = false;
  std::uint64_t generations = 0;
};

/// Samples (T_p, L_p, jump multiset) of a Galton-Watson forest with p roots,
/// one generation at a time. Equal in law to run_to_hitting: the Lukasiewicz
/// path of the forest is the walk, and T_p, L_p and the multiset of out-degrees
/// do not depend on the order in which vertices are explored.
///
/// Each generation splits its vertices over the well-populated offspring
/// classes by binomials and draws the rest individually, so the cost is
/// roughly O(generations * log Q + #vertices in rare classes) instead of O(T_p).
template <class URBG>
ForestDraw sample_forest(const OffspringLaw& law, std::uint64_t p, URBG& g, const ForestOptions& opt = {},
                         std::optional<ForestTilt> tilt = std::nullopt) {
  if (p == 0) throw DomainError("sample_forest: p must be positive");
  const std::size_t table_top = law.table_size() - 1;
  const std::size_t K = std::min(opt.dense_limit, table_top);

  // Class probabilities for offspring 0..K plus "more than K".
  std::vector<double> nu(K + 1);
  double head = 0.0;
  double qpow = 1.0;  // q^{k-1}
  for (std::size_t k = 0; k <= K; ++k) {
    double v = law.table()[k];
    if (tilt) {
      if (k == 0)
        v *= tilt->leaf;
      else {
        v *= tilt->scale * qpow;
        qpow *= tilt->q;
      }
    }
    nu[k] = v;
    head += v;
  }
  const bool has_big = law.has_tail() || K < table_top;
  const double big = has_big ? std::max(0.0, 1.0 - head) : 0.0;

  auto draw_big = [&]() -> std::uint64_t {
    if (!tilt) return law.sample_above(K, g);
    // Propose from mu restricted to k > K and thin by q^{k-1-K}.
    for (;;) {
      const std::uint64_t k = law.sample_above(K, g);
      const double accept = std::pow(tilt->q, static_cast<double>(k - 1 - K));
      if (accept >= 1.0 || uniform01(g) < accept) return k;
    }
  };

  // Cumulative table for vertex-by-vertex sampling in small generations.
  std::vector<double> cum(K + 1);
  {
    double c = 0.0;
    for (std::size_t k = 0; k <= K; ++k) cum[k] = (c += nu[k]);
  }
  const double total = cum[K] + big;

  ForestDraw out;
  WalkRun& run = out.run;
  run.p = p;
  const std::uint64_t rcap = std::max<std::uint64_t>(opt.record_cap, 1);
  JumpMultisetBuilder jumps(rcap <= 4096 ? std::max<std::size_t>(K, rcap) : K);
  std::vector<std::uint64_t> counts(K + 1);

  std::uint64_t Q = p;
  while (Q > 0) {
    if (Q > opt.step_cap || run.T > opt.step_cap - Q) {
      run.truncated = true;
      break;
    }
    run.T += Q;
    ++out.generations;
    std::fill(counts.begin(), counts.end(), 0);
    std::uint64_t next = 0, n_big = 0;

    // Binomial splitting only for the classes that are well populated in this
    // generation; the few vertices beyond the cut are drawn one at a time.
    std::size_t cut = 0;
    while (cut < K && static_cast<double>(Q) * (total - cum[cut]) >= 8.0 * total) ++cut;
    std::uint64_t rem = Q;
    double prem = total;
    for (std::size_t k = 0; k < cut && rem > 0; ++k) {
      const double pk = std::clamp(nu[k] / prem, 0.0, 1.0);
      std::uint64_t n = 0;
      if (pk >= 1.0)
        n = rem;
      else if (pk > 0.0)
        n = std::binomial_distribution<std::uint64_t>(rem, pk)(g);
      counts[k] = n;
      rem -= n;
      prem -= nu[k];
    }
    const double base = cut ? cum[cut - 1] : 0.0;
    for (std::uint64_t i = 0; i < rem; ++i) {
      const double u = base + uniform01(g) * (total - base);
      std::size_t k = cut;
      while (k <= K && u >= cum[k]) ++k;
      if (k <= K)
        ++counts[k];
      else if (has_big)
        ++n_big;
      else
        ++counts[K];  // rounding at the very top of a finite law
    }

    run.L += counts[0];
    for (std::size_t k = 1; k <= K; ++k) {
      if (!counts[k]) continue;
      jumps.add(std::min<std::uint64_t>(k, rcap), counts[k]);
      next += counts[k] * k;
    }
    for (std::uint64_t i = 0; i < n_big; ++i) {
      const std::uint64_t k = draw_big();
      jumps.add(std::min(k, rcap));
      next = (next > std::numeric_limits<std::uint64_t>::max() - k) ? std::numeric_limits<std::uint64_t>::max()
                                                                     : next + k;
    }
    Q = next;

    if (opt.reject_below) {
      const double bound = static_cast<double>(p + 1) / (1.0 + static_cast<double>(run.L) + static_cast<double>(Q));
      if (bound < *opt.reject_below) {
        out.rejected = true;
        break;
      }
    }
  }
  run.jumps = jumps.build();
  return out;
}

}  // namespace pcascade
