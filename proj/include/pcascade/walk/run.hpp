#pragma once

#include <cstdint>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/walk/jumps.hpp"
#include "pcascade/walk/step_law.hpp"

namespace pcascade {

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000'000ULL;

/// One excursion of a skip-free walk from 0 to its first passage at -p.
struct WalkRun {
  std::uint64_t p = 0;
  std::uint64_t T = 0;  // first-passage time T_p (steps taken, if truncated)
  std::uint64_t L = 0;  // number of -1 steps up to T_p
  JumpMultiset jumps;   // X_i + 1 over the steps with X_i >= 0
  bool truncated = false;
  std::vector<std::int64_t> steps;  // full step record, only when requested

  /// Sum of f(X_i), i <= T, from the leaf count and the jump multiset.
  template <class F>
  long double step_sum(F&& f) const {
    long double s = static_cast<long double>(L) * f(std::int64_t{-1});
    for (const auto& [v, c] : jumps.runs()) s += static_cast<long double>(c) * f(static_cast<std::int64_t>(v) - 1);
    return s;
  }
};

/// Walks step by step until S hits -p or step_cap steps have been taken.
template <class URBG>
WalkRun run_to_hitting(const StepLaw& step, std::uint64_t p, URBG& g, std::uint64_t step_cap = kDefaultStepCap,
                       bool record_steps = false) {
  if (p == 0) throw DomainError("run_to_hitting: p must be positive");
  if (step_cap < p) throw DomainError("run_to_hitting: step_cap must be at least p");
  WalkRun run;
  run.p = p;
  JumpMultisetBuilder jumps;
  std::int64_t s = 0;
  const std::int64_t target = -static_cast<std::int64_t>(p);
  while (s > target) {
    if (run.T == step_cap) {
      run.truncated = true;
      break;
    }
    const std::int64_t x = step.sample(g);
    ++run.T;
    s += x;
    if (x == -1)
      ++run.L;
    else
      jumps.add(static_cast<std::uint64_t>(x + 1));
    if (record_steps) run.steps.push_back(x);
  }
  run.jumps = jumps.build();
  return run;
}

}  // namespace pcascade
