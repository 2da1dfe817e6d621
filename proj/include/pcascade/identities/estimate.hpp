#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pcascade/error.hpp"

namespace pcascade {

enum class EstimateMethod {
  exact_dp,
  quadrature,
  closed_form,
  mc_mean,         // plain mean, stderr = sd / sqrt(n)
  mc_mom,          // median of block means, heavy-tail safe
  mc_conditional,  // mean of conditional expectations given a mixing variable
};

inline std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::exact_dp: return "exact_dp";
    case EstimateMethod::quadrature: return "quadrature";
    case EstimateMethod::closed_form: return "closed_form";
    case EstimateMethod::mc_mean: return "mc_mean";
    case EstimateMethod::mc_mom: return "mc_mom";
    case EstimateMethod::mc_conditional: return "mc_conditional";
  }
  return "unknown";
}

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;  // standard error, or the median-of-means spread for mc_mom
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  EstimateMethod method = EstimateMethod::closed_form;

  static Estimate exact(double v, EstimateMethod m = EstimateMethod::closed_form) { return {v, 0.0, 0, 0, m}; }
  bool is_mc() const {
    return method == EstimateMethod::mc_mean || method == EstimateMethod::mc_mom ||
           method == EstimateMethod::mc_conditional;
  }
};

/// Neumaier-compensated sum. Replicates are always added in index order, so
/// the result does not depend on how they were spread over workers.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      c_ += (sum_ - t) + x;
    else
      c_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

inline double kahan_sum(const std::vector<double>& xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline Estimate mean_estimate(const std::vector<double>& xs, std::uint64_t seed,
                              EstimateMethod method = EstimateMethod::mc_mean) {
  if (xs.empty()) throw DomainError("mean_estimate: no replicates");
  const double n = static_cast<double>(xs.size());
  const double m = kahan_sum(xs) / n;
  KahanSum ss;
  for (double x : xs) ss.add((x - m) * (x - m));
  const double var = xs.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  return {m, std::sqrt(var / n), xs.size(), seed, method};
}

/// Median of `blocks` contiguous block means. The spread is the scaled median
/// absolute deviation of the block means divided by sqrt(blocks), times
/// sqrt(pi/2) for the efficiency of a median: a stderr-like number that stays
/// finite when the variance does not exist.
inline Estimate median_of_means(const std::vector<double>& xs, std::uint64_t seed, std::size_t blocks = 20) {
  if (xs.size() < blocks || blocks == 0) throw DomainError("median_of_means: fewer replicates than blocks");
  std::vector<double> means(blocks);
  const std::size_t per = xs.size() / blocks;
  for (std::size_t b = 0; b < blocks; ++b) {
    KahanSum s;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) s.add(xs[i]);
    means[b] = s.value() / static_cast<double>(per);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  const double med = median(means);
  std::vector<double> dev(blocks);
  for (std::size_t b = 0; b < blocks; ++b) dev[b] = std::fabs(means[b] - med);
  const double mad_sd = 1.4826 * median(dev);
  const double spread = std::sqrt(M_PI / 2.0) * mad_sd / std::sqrt(static_cast<double>(blocks));
  return {med, spread, blocks * per, seed, EstimateMethod::mc_mom};
}

}  // namespace pcascade
