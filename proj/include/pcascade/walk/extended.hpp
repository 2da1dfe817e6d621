#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/walk/run.hpp"
#include "pcascade/walk/step_law.hpp"

namespace pcascade {

using PairFunction = std::function<double(std::int64_t, std::int64_t)>;

/// One replicate of each side of the two-step extension of the hitting-time
/// identity (m = 2, no functional of the remaining steps):
///   lhs = 1{T_p > 2} / ((T_p - 1)(T_p - 2)) * sum over ordered pairs i != j of f(X_i, X_j)
///   rhs = f(X_1, X_2) p 1{T_p > 2} / (p + X_1 + X_2)
/// The two sides use independent draws; only their means are equal.
struct ExtendedSample {
  double lhs;
  double rhs;
};

/// Sum of f over ordered pairs of distinct indices, from value counts:
///   sum_{a,b} c_a c_b f(a, b) - sum_a c_a f(a, a).
inline long double ordered_pair_sum(const std::vector<std::pair<std::int64_t, std::uint64_t>>& counts,
                                    const PairFunction& f) {
  long double s = 0.0L;
  for (const auto& [a, ca] : counts) {
    for (const auto& [b, cb] : counts) s += static_cast<long double>(ca) * cb * f(a, b);
    s -= static_cast<long double>(ca) * f(a, a);
  }
  return s;
}

template <class URBG>
ExtendedSample extended_identity_sample(const StepLaw& step, const PairFunction& f, std::uint64_t p, URBG& g,
                                        std::uint64_t step_cap = kDefaultStepCap) {
  if (p == 0) throw DomainError("extended identity: p must be positive");
  ExtendedSample out{0.0, 0.0};

  const WalkRun run = run_to_hitting(step, p, g, step_cap);
  if (run.T > 2) {
    std::vector<std::pair<std::int64_t, std::uint64_t>> counts;
    if (run.L) counts.emplace_back(-1, run.L);
    for (const auto& [v, c] : run.jumps.runs()) counts.emplace_back(static_cast<std::int64_t>(v) - 1, c);
    const long double T = static_cast<long double>(run.T);
    out.lhs = static_cast<double>(ordered_pair_sum(counts, f) / ((T - 1) * (T - 2)));
  }

  const std::int64_t x1 = step.sample(g), x2 = step.sample(g);
  const std::int64_t P = static_cast<std::int64_t>(p);
  const bool hit_by_2 = (x1 == -P) || (x1 + x2 == -P);
  if (!hit_by_2) out.rhs = f(x1, x2) * static_cast<double>(P) / static_cast<double>(P + x1 + x2);
  return out;
}

}  // namespace pcascade
