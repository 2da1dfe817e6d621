#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "pcascade/error.hpp"
#include "pcascade/offspring/weights.hpp"

namespace pcascade {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine.
template <class URBG>
inline double uniform01(URBG& g) {
  static_assert(URBG::max() == std::numeric_limits<std::uint64_t>::max() && URBG::min() == 0,
                "uniform01 expects a full 64-bit engine");
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Parameters of the built-in critical family with generating function
/// g(s) = s + gamma (1 - s)^alpha.
struct StableFamily {
  double alpha;
  double gamma;
};

/// A probability law on {0, 1, 2, ...}: an exact table up to a cutoff K and,
/// for heavy-tailed laws, a discrete Pareto tail P(k >= m) = tail_mass ((K+1)/m)^a
/// beyond it, with a the tail exponent of the law (alpha for the stable family).
///
/// Immutable; copies share the tables.
class OffspringLaw {
 public:
  static constexpr std::size_t kDefaultCut = 1'000'000;

  /// mu(0) = gamma, mu(1) = 1 - gamma alpha, mu(k) = gamma (-1)^k binom(alpha, k) for k >= 2.
  static OffspringLaw stable(double alpha, double gamma, std::size_t k_cut = kDefaultCut) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("stable_offspring: alpha must lie in (1,2)");
    if (!(gamma > 0.0)) throw DomainError("stable_offspring: gamma must be positive");
    if (gamma > 1.0 / alpha * (1.0 + 1e-15)) throw DomainError("stable_offspring: gamma > 1/alpha makes mu(1) negative");
    if (k_cut < 2) throw DomainError("stable_offspring: cutoff too small");
    std::vector<double> pmf(k_cut + 1);
    pmf[0] = gamma;
    pmf[1] = std::max(0.0, 1.0 - gamma * alpha);
    double c = -alpha;  // (-1)^k binom(alpha, k) at k = 1
    for (std::size_t k = 1; k < k_cut; ++k) {
      c *= (static_cast<double>(k) - alpha) / static_cast<double>(k + 1);
      pmf[k + 1] = gamma * c;
    }
    OffspringLaw law(std::move(pmf));
    const double K = static_cast<double>(k_cut);
    // Exact tail sums of the binomial series beyond K.
    law.tail_mass_ = gamma * std::exp(std::lgamma(K + 1.0 - alpha) - std::lgamma(K + 1.0)) / -std::tgamma(1.0 - alpha);
    law.tail_mean_ = gamma * alpha * std::exp(std::lgamma(K + 1.0 - alpha) - std::lgamma(K)) / std::tgamma(2.0 - alpha);
    law.tail_exponent_ = alpha;
    law.stable_ = StableFamily{alpha, gamma};
    law.finish();
    return law;
  }

  static OffspringLaw stable_default(double alpha, std::size_t k_cut = kDefaultCut) {
    return stable(alpha, 1.0 / alpha, k_cut);
  }

  /// Finite-support law given by its probabilities; must sum to 1 within 1e-12.
  static OffspringLaw from_pmf(std::vector<double> pmf) {
    if (pmf.empty()) throw DomainError("from_pmf: empty law");
    for (double v : pmf)
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("from_pmf: probabilities must be non-negative");
    while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
    OffspringLaw law(std::move(pmf));
    law.finish();
    if (std::fabs(law.total_mass() - 1.0) > 1e-12) throw DomainError("from_pmf: probabilities do not sum to 1");
    return law;
  }

  /// The Janson-Stefansson law mu(0) = 1/Z, mu(k) = ghat_k Z^{k-1}.
  static OffspringLaw from_weights(const WeightSequence& w, double z) {
    if (!(z >= 1.0)) throw NotAdmissible("admissibility root must be >= 1");
    const std::size_t n = w.last_index();
    std::vector<double> pmf(n + 1);
    pmf[0] = 1.0 / z;
    double zpow = 1.0;  // z^{k-1}
    for (std::size_t k = 1; k <= n; ++k) {
      pmf[k] = w.entry(k) * zpow;
      zpow *= z;
    }
    OffspringLaw law(std::move(pmf));
    law.z_g_ = z;
    if (!w.is_finite_list()) {
      // Whatever mass the truncated series misses goes to a Pareto tail with the declared exponent.
      double head = 0.0;
      for (double v : *law.pmf_) head += v;
      law.tail_mass_ = std::max(0.0, 1.0 - head);
      law.tail_exponent_ = std::max(w.tail_exponent() - 1.0, 1.0 + 1e-9);
      const double a = law.tail_exponent_, K1 = static_cast<double>(n + 1);
      law.tail_mean_ = law.tail_mass_ * K1 * a / (a - 1.0);
    }
    law.finish();
    if (std::fabs(law.total_mass() - 1.0) > 1e-12)
      throw NotAdmissible("law built from weights does not sum to 1 (is z the admissibility root?)");
    return law;
  }

  double pmf(std::uint64_t k) const {
    if (k < pmf_->size()) return (*pmf_)[k];
    if (stable_) {
      const double a = stable_->alpha, kk = static_cast<double>(k);
      return stable_->gamma * std::exp(std::lgamma(kk - a) - std::lgamma(kk + 1.0)) / std::tgamma(-a);
    }
    if (tail_mass_ > 0.0) {
      const double K1 = static_cast<double>(pmf_->size()), kk = static_cast<double>(k), a = tail_exponent_;
      return tail_mass_ * (std::pow(K1 / kk, a) - std::pow(K1 / (kk + 1.0), a));
    }
    return 0.0;
  }

  /// Number of tabulated entries (K_cut + 1, or the support size for finite laws).
  std::size_t table_size() const { return pmf_->size(); }
  const std::vector<double>& table() const { return *pmf_; }

  /// P(k <= K) for K inside the table.
  double cdf(std::size_t k) const { return k < cdf_->size() ? (*cdf_)[k] : total_mass(); }

  double table_mass() const { return cdf_->back(); }
  double tail_mass() const { return tail_mass_; }
  double total_mass() const { return table_mass() + tail_mass_; }
  bool has_tail() const { return tail_mass_ > 0.0; }

  /// sum k mu(k), with the part beyond the table added analytically.
  double mean() const { return mean_; }
  bool is_critical() const { return std::fabs(mean_ - 1.0) <= 1e-10; }

  /// alpha + 1 for heavy-tailed laws, +inf for finite support.
  double tail_index() const {
    return has_tail() ? tail_exponent_ + 1.0 : std::numeric_limits<double>::infinity();
  }

  const std::optional<StableFamily>& stable_family() const { return stable_; }
  std::optional<double> z_g() const { return z_g_; }

  /// Largest k with positive mass, or max uint64 for heavy-tailed laws.
  std::uint64_t max_support() const {
    return has_tail() ? std::numeric_limits<std::uint64_t>::max() : pmf_->size() - 1;
  }

  /// Inverse CDF: binary search in the table, Pareto inversion beyond it.
  std::uint64_t quantile(double u) const {
    const auto& c = *cdf_;
    if (u < c.back() || !has_tail()) {
      const auto it = std::upper_bound(c.begin(), c.end(), u);
      if (it == c.end()) return last_positive_;
      return static_cast<std::uint64_t>(it - c.begin());
    }
    const double v = std::clamp((u - c.back()) / (1.0 - c.back()), 0.0, 1.0 - 0x1.0p-53);
    const double k = std::floor(static_cast<double>(c.size()) * std::pow(1.0 - v, -1.0 / tail_exponent_));
    return k >= 9.0e18 ? static_cast<std::uint64_t>(9.0e18) : static_cast<std::uint64_t>(k);
  }

  template <class URBG>
  std::uint64_t sample(URBG& g) const {
    return quantile(uniform01(g));
  }

  /// Draw from the law conditioned on k > K (K must lie inside the table).
  template <class URBG>
  std::uint64_t sample_above(std::size_t K, URBG& g) const {
    const double lo = (*cdf_)[K];
    return std::max<std::uint64_t>(quantile(lo + uniform01(g) * (1.0 - lo)), K + 1);
  }

 private:
  explicit OffspringLaw(std::vector<double> pmf) : pmf_(std::make_shared<const std::vector<double>>(std::move(pmf))) {}

  void finish() {
    const auto& p = *pmf_;
    std::vector<double> c(p.size());
    double sum = 0.0, comp = 0.0, msum = 0.0, mcomp = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      double y = p[k] - comp, t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      c[k] = sum;
      y = static_cast<double>(k) * p[k] - mcomp;
      t = msum + y;
      mcomp = (t - msum) - y;
      msum = t;
      if (p[k] > 0.0) last_positive_ = k;
    }
    cdf_ = std::make_shared<const std::vector<double>>(std::move(c));
    mean_ = msum + tail_mean_;
  }

  std::shared_ptr<const std::vector<double>> pmf_;
  std::shared_ptr<const std::vector<double>> cdf_;
  double tail_mass_ = 0.0;
  double tail_mean_ = 0.0;
  double tail_exponent_ = 0.0;
  double mean_ = 0.0;
  std::uint64_t last_positive_ = 0;
  std::optional<StableFamily> stable_;
  std::optional<double> z_g_;
};

/// mu_JS from an admissible weight sequence (solves for Z_g first).
inline OffspringLaw mu_from_weights(const WeightSequence& w) {
  return OffspringLaw::from_weights(w, solve_admissibility(w).z);
}

inline OffspringLaw mu_from_weights(const WeightSequence& w, double z_g) { return OffspringLaw::from_weights(w, z_g); }

inline OffspringLaw stable_offspring(double alpha, double gamma) { return OffspringLaw::stable(alpha, gamma); }

template <class URBG>
std::uint64_t sample(const OffspringLaw& law, URBG& g) {
  return law.sample(g);
}

}  // namespace pcascade
