#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/offspring/law.hpp"

namespace pcascade {

/// Step distribution of a skip-free (left-continuous) walk: X = k - 1 with k
/// drawn from an offspring law, so X >= -1 and P(X = -1) = mu(0).
class StepLaw {
 public:
  explicit StepLaw(OffspringLaw law) : law_(std::move(law)) {
    if (!(law_.pmf(0) > 0.0)) throw DomainError("step law needs P(X = -1) > 0");
    if (!law_.has_tail() && law_.mean() > 1.0 + 1e-12)
      throw DomainError("step law drifts to +infinity (E[X] > 0); first passage is not a.s. finite");
  }

  /// Finite-support law from {step: probability}; steps must be >= -1.
  static StepLaw from_steps(const std::map<std::int64_t, double>& probs) {
    std::int64_t top = -1;
    for (const auto& [x, pr] : probs) {
      if (x < -1) throw DomainError("skip-free steps must be >= -1");
      top = std::max(top, x);
    }
    std::vector<double> pmf(static_cast<std::size_t>(top + 2), 0.0);
    for (const auto& [x, pr] : probs) pmf[static_cast<std::size_t>(x + 1)] += pr;
    return StepLaw(OffspringLaw::from_pmf(std::move(pmf)));
  }

  /// X = -1 surely.
  static StepLaw descent() { return from_steps({{-1, 1.0}}); }
  /// Simple symmetric walk, X = +-1 with probability 1/2.
  static StepLaw plus_minus_one() { return from_steps({{-1, 0.5}, {1, 0.5}}); }

  const OffspringLaw& offspring() const { return law_; }

  double prob(std::int64_t x) const { return x < -1 ? 0.0 : law_.pmf(static_cast<std::uint64_t>(x + 1)); }
  double mean() const { return law_.mean() - 1.0; }
  bool finite_support() const { return !law_.has_tail(); }

  /// Largest step with positive probability (finite-support laws only).
  std::int64_t max_step() const {
    if (!finite_support()) throw DomainError("max_step: heavy-tailed step law");
    return static_cast<std::int64_t>(law_.max_support()) - 1;
  }

  template <class URBG>
  std::int64_t sample(URBG& g) const {
    return static_cast<std::int64_t>(law_.sample(g)) - 1;
  }

 private:
  OffspringLaw law_;
};

}  // namespace pcascade
