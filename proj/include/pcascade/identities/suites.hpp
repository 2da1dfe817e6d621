#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcascade/analytic.hpp"
#include "pcascade/cascade.hpp"
#include "pcascade/identities/conditional.hpp"
#include "pcascade/identities/estimate.hpp"
#include "pcascade/identities/parallel.hpp"
#include "pcascade/identities/report.hpp"
#include "pcascade/offspring.hpp"
#include "pcascade/rng.hpp"
#include "pcascade/walk.hpp"

namespace pcascade {

struct SuiteOptions {
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: default_workers()
};

struct NamedStepLaw {
  std::string name;
  StepLaw step;
};

/// The three finite-support laws used by the exact suites: the simple walk,
/// a lazy critical walk and a subcritical walk with a +2 step.
inline std::vector<NamedStepLaw> finite_battery() {
  return {
      {"pm1", StepLaw::plus_minus_one()},
      {"lazy", StepLaw::from_steps({{-1, 0.4}, {0, 0.3}, {1, 0.2}, {2, 0.1}})},
      {"subcritical", StepLaw::from_steps({{-1, 0.6}, {0, 0.2}, {2, 0.2}})},
  };
}

namespace detail {

// Stream tags keep the suites' random numbers disjoint under one master seed.
enum SuiteTag : std::uint64_t {
  kTagRwHeavy = 11,
  kTagLevy = 12,
  kTagBiggins = 13,
  kTagFixedPoint = 14,
  kTagMalthusian = 15,
  kTagTailIndex = 16,
  kTagHill = 17,
  kTagStructural = 18,
  kTagLinf = 19,
};

inline unsigned workers_of(const SuiteOptions& o) { return o.workers ? o.workers : default_workers(); }

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline nlohmann::ordered_json cascade_params(const CascadeParameters& params) {
  nlohmann::ordered_json j;
  j["alpha"] = params.alpha();
  j["phase"] = std::string(to_string(params.phase()));
  return j;
}

/// Simulations run the built-in family g(s) = s + (1 - s)^alpha / alpha, whose
/// Levy measure has C = mu(0) = 1/alpha.
inline OffspringLaw simulation_law(const CascadeParameters& params) {
  if (params.is_critical()) throw DomainError("simulation is not defined at alpha = 3/2");
  return OffspringLaw::stable_default(params.alpha());
}

inline double phi_value(const CascadeParameters& params, double theta) {
  const ExtendedReal phi = biggins_transform(params, theta);
  if (!phi.is_finite()) throw DomainError("phi_alpha(theta) is infinite: theta must lie in (alpha, alpha + 1)");
  return phi.value();
}

// Mean of a/b over paired replicates with a delta-method standard error.
inline Estimate ratio_estimate(const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed) {
  const Estimate ea = mean_estimate(a, seed), eb = mean_estimate(b, seed);
  const double r = ea.value / eb.value;
  std::vector<double> resid(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) resid[i] = a[i] - r * b[i];
  const Estimate er = mean_estimate(resid, seed);
  return {r, er.stderr_ / std::fabs(eb.value), a.size(), seed, EstimateMethod::mc_conditional};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact suites

/// P(T_p = n) = (p/n) P(S_n = -p) for p <= p_max, n <= n_max. One report per
/// (law, p), carrying the row with the largest discrepancy.
inline std::vector<VerificationReport> verify_kemperman(const std::vector<NamedStepLaw>& battery,
                                                        std::uint64_t p_max = 8, std::uint64_t n_max = 60) {
  std::vector<VerificationReport> out;
  for (const auto& law : battery) {
    for (std::uint64_t p = 1; p <= p_max; ++p) {
      detail::Stopwatch sw;
      const auto rows = kemperman_table(law.step, p, n_max);
      const auto worst = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::fabs(a.lhs - a.rhs) < std::fabs(b.lhs - b.rhs);
      });
      nlohmann::ordered_json params{{"law", law.name}, {"p", p}, {"n_max", n_max}, {"worst_n", worst->n}};
      auto r = make_report("kemperman", params, Estimate::exact(worst->lhs, EstimateMethod::exact_dp),
                           Estimate::exact(worst->rhs, EstimateMethod::exact_dp), ToleranceRule::absolute, 1e-12);
      r.elapsed_ms = sw.ms();
      out.push_back(std::move(r));
    }
  }
  return out;
}

struct HeavyRwOptions {
  std::vector<std::pair<double, double>> alpha_theta = {{1.2, 1.7}, {1.8, 2.2}};
  std::uint64_t p = 100;
  std::uint64_t replicates = 100'000;
  std::uint64_t step_cap = 1'000'000'000'000ULL;
};

/// E[(1/(T_p - 1)) sum_{i <= T_p} f(X_i)] = E[f(X_1) p/(p + X_1)].
/// Finite laws: DP oracle against the series, within the oracle's truncation
/// bound. Heavy laws (optional): Monte Carlo against the series, |z| <= 3, with
/// f = 1{x = -1} and f = min((x + 1)/p, 1)^theta.
inline std::vector<VerificationReport> verify_rw_identity(const std::vector<NamedStepLaw>& battery,
                                                          const std::optional<HeavyRwOptions>& heavy = std::nullopt,
                                                          const SuiteOptions& so = {},
                                                          const std::vector<std::uint64_t>& ps = {2, 5, 10},
                                                          std::uint64_t n_max = 20'000) {
  std::vector<VerificationReport> out;
  const std::vector<std::pair<std::string, StepFunction>> fs = {
      {"one", [](std::int64_t) { return 1.0; }},
      {"leaf", [](std::int64_t x) { return x == -1 ? 1.0 : 0.0; }},
      {"square", [](std::int64_t x) { return static_cast<double>((x + 1) * (x + 1)); }},
  };
  std::vector<StepFunction> just_f;
  for (const auto& f : fs) just_f.push_back(f.second);

  for (const auto& law : battery) {
    for (std::uint64_t p : ps) {
      detail::Stopwatch sw;
      const auto lhs = rw_identity_lhs_oracle(law.step, just_f, p, n_max);
      const double ms = sw.ms() / static_cast<double>(fs.size());
      for (std::size_t k = 0; k < fs.size(); ++k) {
        const double rhs = rw_identity_rhs(law.step, fs[k].second, p);
        nlohmann::ordered_json params{{"law", law.name}, {"p", p}, {"f", fs[k].first}, {"n_max", n_max},
                                      {"tail_bound", lhs[k].tail_bound}};
        auto r = make_report("rw_identity", params, Estimate::exact(lhs[k].value, EstimateMethod::exact_dp),
                             Estimate::exact(rhs), ToleranceRule::tail_bound, lhs[k].tail_bound + 1e-10);
        r.elapsed_ms = ms;
        out.push_back(std::move(r));
      }
    }
  }
  if (!heavy) return out;

  const std::uint64_t p = heavy->p;
  const double P = static_cast<double>(p);
  for (const auto& [alpha, theta] : heavy->alpha_theta) {
    detail::Stopwatch sw;
    const auto params = CascadeParameters::from_alpha(alpha);
    const OffspringLaw law = detail::simulation_law(params);
    const StepLaw step(law);
    const std::uint64_t seed = derive_seed(so.seed, detail::kTagRwHeavy * 1000 + static_cast<std::uint64_t>(alpha * 100));
    ForestOptions fo;
    fo.step_cap = heavy->step_cap;
    fo.record_cap = p + 1;  // f saturates at x + 1 >= p
    struct Rep {
      double leaf = 0.0, power = 0.0;
      bool truncated = false;
    };
    const auto reps = parallel_map<Rep>(heavy->replicates, detail::workers_of(so), [&](std::size_t i) {
      Rng g = derive_stream(seed, i);
      const ForestDraw d = sample_forest(law, p, g, fo);
      if (d.run.truncated) return Rep{0.0, 0.0, true};
      const double tm1 = static_cast<double>(d.run.T - 1);
      long double s = 0.0L;
      for (const auto& [v, c] : d.run.jumps.runs())
        s += static_cast<long double>(c) * std::pow(std::min(static_cast<double>(v) / P, 1.0), theta);
      return Rep{static_cast<double>(d.run.L) / tm1, static_cast<double>(s) / tm1, false};
    });
    std::vector<double> leaf, power;
    std::uint64_t truncated = 0;
    for (const auto& r : reps) {
      if (r.truncated) {
        ++truncated;
        continue;
      }
      leaf.push_back(r.leaf);
      power.push_back(r.power);
    }
    const double ms = sw.ms() / 2.0;
    const std::vector<std::pair<std::string, StepFunction>> hf = {
        {"leaf", [](std::int64_t x) { return x == -1 ? 1.0 : 0.0; }},
        {"capped_power",
         [P, theta](std::int64_t x) { return std::pow(std::min(static_cast<double>(x + 1) / P, 1.0), theta); }},
    };
    for (std::size_t k = 0; k < hf.size(); ++k) {
      const double rhs = rw_identity_rhs(step, hf[k].second, p);
      nlohmann::ordered_json prm = detail::cascade_params(params);
      prm["theta"] = theta;
      prm["p"] = p;
      prm["f"] = hf[k].first;
      prm["truncated_runs"] = truncated;
      auto r = make_report("rw_identity_heavy", prm, mean_estimate(k == 0 ? leaf : power, seed),
                           Estimate::exact(rhs), ToleranceRule::z_score, 3.0, seed);
      r.elapsed_ms = ms;
      if (truncated) r.note = "runs that hit the step cap are excluded";
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Jump statistics of the first generation

/// p^alpha E[(1/T_p) sum_i ((X_i + 1)/p)^theta] against C pi/(Gamma(-alpha) sin(pi(theta - alpha)))
/// with C = 1/alpha, the ratio against E[1/T_p] against phi_alpha(theta), and the
/// trend of the gap over p_grid.
inline std::vector<VerificationReport> verify_levy_formula(const CascadeParameters& params, double theta,
                                                           const std::vector<std::uint64_t>& p_grid = {1000, 10000},
                                                           std::uint64_t replicates = 10'000,
                                                           const SuiteOptions& so = {}, double tolerance = 0.07) {
  if (p_grid.empty()) throw DomainError("verify_levy_formula: empty p grid");
  const OffspringLaw law = detail::simulation_law(params);
  const double gamma = law.stable_family()->gamma;
  const auto scaled = CascadeParameters::from_alpha(params.alpha(), gamma);
  const double closed = stable_jump_moment(scaled, theta).value();
  const double phi = detail::phi_value(params, theta);
  const PowerSeries S(law, theta);

  std::vector<VerificationReport> out;
  std::vector<double> gaps;
  for (std::uint64_t p : p_grid) {
    detail::Stopwatch sw;
    const std::uint64_t seed = derive_seed(so.seed, detail::kTagLevy * 1'000'000 + p);
    const auto reps = parallel_map<LevyTerms>(replicates, detail::workers_of(so), [&](std::size_t i) {
      Rng g = derive_stream(seed, i);
      return levy_replicate(S, p, g);
    });
    std::vector<double> jumps(reps.size()), inverse(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
      jumps[i] = reps[i].jumps;
      inverse[i] = reps[i].inverse;
    }
    Estimate lhs = mean_estimate(jumps, seed, EstimateMethod::mc_conditional);
    nlohmann::ordered_json prm = detail::cascade_params(params);
    prm["theta"] = theta;
    prm["p"] = p;
    prm["levy_scale"] = gamma;
    prm["finite_p_quadrature"] = levy_jump_moment_exact(S, p);
    auto r = make_report("levy_formula", prm, lhs, Estimate::exact(closed), ToleranceRule::relative, tolerance, seed);
    r.elapsed_ms = sw.ms();
    gaps.push_back(std::fabs(r.discrepancy()));
    out.push_back(std::move(r));

    auto rr = make_report("levy_ratio", prm, detail::ratio_estimate(jumps, inverse, seed), Estimate::exact(phi),
                          ToleranceRule::relative, tolerance, seed);
    rr.note = "p^alpha E[(1/T) sum f] / (p^alpha E[1/T]) against phi_alpha(theta)";
    out.push_back(std::move(rr));
  }
  if (p_grid.size() > 1) {
    nlohmann::ordered_json prm = detail::cascade_params(params);
    prm["theta"] = theta;
    prm["p_small"] = p_grid.front();
    prm["p_large"] = p_grid.back();
    auto r = make_report("levy_gap_trend", prm, Estimate::exact(gaps.back()), Estimate::exact(gaps.front()),
                         ToleranceRule::at_most, 0.0);
    r.note = "relative gap at the largest p must not exceed the gap at the smallest p";
    out.push_back(std::move(r));
  }
  return out;
}

enum class BigginsMethod {
  conditional,  // closed-form conditional mean given the mixing variable, importance sampled
  sampler,      // plain sums over sampled first generations (median of means)
};

/// E[sum_{|u| = k} (chi(u)/p)^theta] against phi_alpha(theta)^k. k = 0 is the
/// trivial identity; the conditional estimator covers k <= 2, the plain
/// sampler k = 1. For k = 1 a second report checks the Monte Carlo mean against
/// the exact finite-p value p^{1-theta}/(gamma alpha B(alpha, p+1)) sum_k mu(k) k^theta/(p+k).
inline std::vector<VerificationReport> verify_biggins(const CascadeParameters& params, double theta, std::uint64_t p,
                                                      std::size_t k, std::uint64_t replicates,
                                                      const SuiteOptions& so = {},
                                                      BigginsMethod method = BigginsMethod::conditional,
                                                      std::optional<double> tolerance = std::nullopt) {
  const double phi = detail::phi_value(params, theta);
  nlohmann::ordered_json prm = detail::cascade_params(params);
  prm["theta"] = theta;
  prm["p"] = p;
  prm["k"] = k;
  std::vector<VerificationReport> out;
  if (k == 0) {
    out.push_back(make_report("biggins", prm, Estimate::exact(1.0), Estimate::exact(1.0), ToleranceRule::absolute, 0.0));
    return out;
  }
  if (k > 2 || (method == BigginsMethod::sampler && k > 1))
    throw DomainError("verify_biggins: supported generations are k <= 2 (conditional) and k = 1 (sampler)");
  const double tol = tolerance.value_or(k == 1 ? 0.05 : 0.08);

  detail::Stopwatch sw;
  const OffspringLaw law = detail::simulation_law(params);
  const PowerSeries S(law, theta);
  const std::uint64_t seed = derive_seed(so.seed, detail::kTagBiggins * 1'000'000 + 10 * p + k);
  const double exact1 = biggins_first_generation_exact(S, p);
  Estimate lhs;
  if (method == BigginsMethod::conditional) {
    const auto v = parallel_map<double>(replicates, detail::workers_of(so), [&](std::size_t i) {
      Rng g = derive_stream(seed, i);
      return k == 1 ? biggins_first_generation_replicate(S, p, g) : biggins_second_generation_replicate(S, p, g);
    });
    lhs = mean_estimate(v, seed, EstimateMethod::mc_conditional);
  } else {
    const StepLaw step(law);
    const auto v = parallel_map<double>(replicates, detail::workers_of(so), [&](std::size_t i) {
      Rng g = derive_stream(seed, i);
      return sample_children(p, step, g).children.power_sum(theta, static_cast<double>(p));
    });
    lhs = median_of_means(v, seed);
  }
  prm["method"] = method == BigginsMethod::conditional ? "conditional" : "sampler";
  prm["finite_p_first_generation"] = exact1;
  auto r = make_report("biggins", prm, lhs, Estimate::exact(std::pow(phi, static_cast<double>(k))),
                       ToleranceRule::relative, tol, seed);
  r.elapsed_ms = sw.ms();
  out.push_back(std::move(r));
  // The median of means sits well below the mean at tail index (1 + alpha)/theta < 2,
  // so only the conditional estimator is held to the exact finite-p value.
  if (k == 1 && method == BigginsMethod::conditional) {
    auto e = make_report("biggins_finite_p", prm, lhs, Estimate::exact(exact1), ToleranceRule::z_score, 3.0, seed);
    e.note = "Monte Carlo against the exact mean of the simulated finite-p model";
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixed point of psi and the cumulant root behind it

/// E[prod_i psi_{alpha,theta}(x x_i^theta)] over draws of nu_alpha against
/// psi_{alpha,theta}(x), within 3 stderr plus a relative systematic allowance.
inline std::vector<VerificationReport> verify_fixed_point_psi(const CascadeParameters& params, double theta = 1.0,
                                                              const std::vector<double>& x_grid = {0.25, 0.5, 1.0},
                                                              std::uint64_t replicates = 2000,
                                                              std::uint64_t p_base = 10'000,
                                                              const SuiteOptions& so = {}, double systematic = 0.05) {
  detail::Stopwatch sw;
  const OffspringLaw law = detail::simulation_law(params);
  const StepLaw step(law);
  const std::uint64_t seed = derive_seed(so.seed, detail::kTagFixedPoint * 1'000'000 + p_base);
  const double P = static_cast<double>(p_base);

  // log psi(x (v/p)^theta) for the child values that occur most often.
  const std::uint64_t cached = 4 * p_base;
  std::vector<std::vector<double>> log_psi(x_grid.size(), std::vector<double>(cached + 1, 0.0));
  for (std::size_t j = 0; j < x_grid.size(); ++j)
    for (std::uint64_t v = 1; v <= cached; ++v)
      log_psi[j][v] = std::log(psi(params, theta, x_grid[j] * std::pow(static_cast<double>(v) / P, theta)));

  const auto reps = parallel_map<std::vector<double>>(replicates, detail::workers_of(so), [&](std::size_t i) {
    Rng g = derive_stream(seed, i);
    const NuAlphaSample s = nu_alpha_sample(p_base, step, g);
    std::vector<double> prod(x_grid.size());
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
      long double lp = 0.0L;
      for (const auto& [v, c] : s.children.runs()) {
        const double l = v <= cached ? log_psi[j][v]
                                     : std::log(psi(params, theta, x_grid[j] * std::pow(static_cast<double>(v) / P, theta)));
        lp += static_cast<long double>(c) * l;
      }
      prod[j] = std::exp(static_cast<double>(lp));
    }
    return prod;
  });
  const double ms = sw.ms() / static_cast<double>(std::max<std::size_t>(x_grid.size(), 1));

  std::vector<VerificationReport> out;
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    std::vector<double> v(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) v[i] = reps[i][j];
    nlohmann::ordered_json prm = detail::cascade_params(params);
    prm["theta"] = theta;
    prm["x"] = x_grid[j];
    prm["p_base"] = p_base;
    auto r = make_report("fixed_point_psi", prm, mean_estimate(v, seed), Estimate::exact(psi(params, theta, x_grid[j])),
                         ToleranceRule::band, systematic, seed);
    r.elapsed_ms = ms;
    out.push_back(std::move(r));
  }
  return out;
}

/// kappa_{psi,x}(2x) = 0.
inline std::vector<VerificationReport> verify_cumulant_root(const CascadeParameters& params,
                                                            const std::vector<double>& x_list = {0.5, 1.0, 2.0}) {
  std::vector<VerificationReport> out;
  for (double x : x_list) {
    detail::Stopwatch sw;
    const QuadratureResult q = cumulant_kappa_psi(params, x, 2.0 * x);
    nlohmann::ordered_json prm = detail::cascade_params(params);
    prm["x"] = x;
    prm["lambda"] = 2.0 * x;
    Estimate lhs{q.value, q.error, 0, 0, EstimateMethod::quadrature};
    auto r = make_report("cumulant_root", prm, lhs, Estimate::exact(0.0), ToleranceRule::absolute, 1e-8);
    r.elapsed_ms = sw.ms();
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cascades

struct MalthusianOptions {
  std::uint64_t p = 2000;
  std::size_t depth = 5;
  std::uint64_t trees = 2000;
  std::vector<double> x_grid = {0.5, 1.0, 2.0};
  std::uint64_t t_min = 100;          // labels below are frozen at their line value
  std::optional<double> tolerance;    // default 10% dilute, 12% dense
};

/// Per-tree values of the Malthusian martingale W_depth (frozen-line mode).
inline std::vector<double> malthusian_samples(const CascadeParameters& params, const MalthusianOptions& mo,
                                              const SuiteOptions& so = {}) {
  const OffspringLaw law = detail::simulation_law(params);
  const StepLaw step(law);
  GrowOptions go;
  go.max_generation = mo.depth;
  go.t_min = mo.t_min;
  go.store_min = mo.t_min;
  const std::uint64_t seed = derive_seed(so.seed, detail::kTagMalthusian * 1'000'000 + mo.p);
  return parallel_map<double>(mo.trees, detail::workers_of(so), [&](std::size_t i) {
    const CascadeTree tree = grow_cascade(mo.p, step, go, derive_seed(seed, i));
    return malthusian_martingale(tree, params, mo.depth, MartingaleMode::frozen_line);
  });
}

/// Empirical Laplace transform of W_depth against the Malthusian limit law psi,
/// plus E[W_depth] = 1 within the median-of-means spread.
inline std::vector<VerificationReport> verify_malthusian_law(const CascadeParameters& params,
                                                             const MalthusianOptions& mo = {},
                                                             const SuiteOptions& so = {}) {
  detail::Stopwatch sw;
  const auto W = malthusian_samples(params, mo, so);
  const std::uint64_t seed = derive_seed(so.seed, detail::kTagMalthusian * 1'000'000 + mo.p);
  const double tol = mo.tolerance.value_or(params.phase() == Phase::dilute ? 0.10 : 0.12);
  const double ms = sw.ms() / static_cast<double>(mo.x_grid.size() + 1);

  nlohmann::ordered_json base = detail::cascade_params(params);
  base["theta"] = params.malthusian();
  base["p"] = mo.p;
  base["depth"] = mo.depth;
  base["t_min"] = mo.t_min;

  std::vector<VerificationReport> out;
  for (double x : mo.x_grid) {
    std::vector<double> e(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) e[i] = std::exp(-x * W[i]);
    nlohmann::ordered_json prm = base;
    prm["x"] = x;
    auto r = make_report("malthusian_laplace", prm, mean_estimate(e, seed),
                         Estimate::exact(malthusian_limit_laplace(params, x)), ToleranceRule::relative, tol, seed);
    r.elapsed_ms = ms;
    out.push_back(std::move(r));
  }
  auto m = make_report("malthusian_mean", base, median_of_means(W, seed), Estimate::exact(1.0), ToleranceRule::z_score,
                       3.0, seed);
  m.elapsed_ms = ms;
  out.push_back(std::move(m));
  return out;
}

/// Hill estimate of the tail index from the k largest values:
///   1 / mean_{i <= k} log(X_(i) / X_(k+1)), stderr index / sqrt(k).
inline Estimate hill_estimator(std::vector<double> xs, std::size_t k, std::uint64_t seed = 0) {
  if (k == 0 || k >= xs.size()) throw DomainError("hill_estimator: need 0 < k < sample size");
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end(), std::greater<>());
  const double threshold = xs[k];
  if (!(threshold > 0.0)) throw DomainError("hill_estimator: threshold order statistic must be positive");
  KahanSum s;
  for (std::size_t i = 0; i < k; ++i) s.add(std::log(xs[i] / threshold));
  const double index = static_cast<double>(k) / s.value();
  return {index, index / std::sqrt(static_cast<double>(k)), xs.size(), seed, EstimateMethod::mc_mean};
}

/// Hill estimate of the tail index of W_1 = sum_i x_i^theta / phi_alpha(theta)
/// over `samples` draws of nu_alpha at p_base, using the top `top_fraction`.
inline Estimate estimate_W1_tail_index(const CascadeParameters& params, double theta, std::uint64_t samples = 100'000,
                                       std::uint64_t p_base = 1000, const SuiteOptions& so = {},
                                       double top_fraction = 0.01) {
  const double phi = detail::phi_value(params, theta);
  const OffspringLaw law = detail::simulation_law(params);
  const StepLaw step(law);
  const std::uint64_t seed = derive_seed(so.seed, detail::kTagTailIndex * 1'000'000 + p_base);
  const auto w = parallel_map<double>(samples, detail::workers_of(so), [&](std::size_t i) {
    Rng g = derive_stream(seed, i);
    return nu_alpha_sample(p_base, step, g).power_sum(theta) / phi;
  });
  const auto k = static_cast<std::size_t>(std::max(1.0, std::floor(top_fraction * static_cast<double>(samples))));
  return hill_estimator(w, k, seed);
}

/// The tail index of W_1 against (1 + alpha)/theta (15%), and the estimator on
/// exact Pareto data (5%).
inline std::vector<VerificationReport> verify_tail_index(const CascadeParameters& params, double theta,
                                                         std::uint64_t samples = 100'000, std::uint64_t p_base = 1000,
                                                         const SuiteOptions& so = {}) {
  std::vector<VerificationReport> out;
  {
    detail::Stopwatch sw;
    const Estimate e = estimate_W1_tail_index(params, theta, samples, p_base, so);
    nlohmann::ordered_json prm = detail::cascade_params(params);
    prm["theta"] = theta;
    prm["p_base"] = p_base;
    prm["top_fraction"] = 0.01;
    auto r = make_report("tail_index", prm, e, Estimate::exact((1.0 + params.alpha()) / theta),
                         ToleranceRule::relative, 0.15, e.seed);
    r.elapsed_ms = sw.ms();
    out.push_back(std::move(r));
  }
  {
    detail::Stopwatch sw;
    const double index = (1.0 + params.alpha()) / theta;
    const std::uint64_t seed = derive_seed(so.seed, detail::kTagHill);
    std::vector<double> xs(samples);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Rng g = derive_stream(seed, i);
      xs[i] = std::pow(1.0 - uniform01(g), -1.0 / index);  // P(X > x) = x^{-index}, x >= 1
    }
    const auto k = static_cast<std::size_t>(std::max(1.0, std::floor(0.01 * static_cast<double>(samples))));
    nlohmann::ordered_json prm{{"index", index}, {"samples", samples}, {"top_fraction", 0.01}};
    auto r = make_report("hill_self_test", prm, hill_estimator(xs, k, seed), Estimate::exact(index),
                         ToleranceRule::relative, 0.05, seed);
    r.elapsed_ms = sw.ms();
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms

/// Nesting identities of the O(n) loop model for one loop weight n (both phases where they differ):
/// Legendre duality of kappa_alpha with J, kappa_alpha = phi^{-1}(e^{-lambda}) - theta_alpha,
/// psi_kappa as a Biggins transform, and the root of J.
inline std::vector<VerificationReport> verify_nesting_duality(double n_loop, const std::vector<double>& x_grid = {}) {
  std::vector<double> xs = x_grid;
  if (xs.empty())
    for (int i = 1; i <= 20; ++i) xs.push_back(0.1 * i);
  std::vector<VerificationReport> out;
  const auto dense = CascadeParameters::from_loop_weight(n_loop, Phase::dense);
  const double edge = std::log(2.0 / n_loop);
  auto kappa = [&](double l) { return nesting_kappa(dense, std::min(l, edge)).value(); };

  for (double x : xs) {
    detail::Stopwatch sw;
    const LegendreResult lr = legendre_numeric(kappa, x, -40.0, edge);
    nlohmann::ordered_json prm{{"n", n_loop}, {"x", x}};
    auto r = make_report("nesting_legendre", prm, Estimate::exact(lr.value, EstimateMethod::quadrature),
                         Estimate::exact(nesting_rate_J(n_loop, std::numbers::pi * x) / std::numbers::pi),
                         ToleranceRule::absolute, 1e-8);
    r.elapsed_ms = sw.ms();
    out.push_back(std::move(r));
  }

  for (Phase ph : {Phase::dense, Phase::dilute}) {
    const auto params = CascadeParameters::from_loop_weight(n_loop, ph);
    // The grid stops short of log(2/n): at the branch point both sides behave like
    // sqrt(edge - lambda) and rounding in e^lambda is amplified to ~1e-8.
    const double last = edge - 1e-2;
    for (int i = 0; i <= 10; ++i) {
      const double lambda = -2.0 + (last + 2.0) * i / 10.0;
      nlohmann::ordered_json prm = detail::cascade_params(params);
      prm["n"] = n_loop;
      prm["lambda"] = lambda;
      const double via_phi = biggins_inverse(params, std::exp(-lambda)) - params.malthusian();
      out.push_back(make_report("nesting_kappa", prm, Estimate::exact(nesting_kappa(params, lambda).value()),
                                Estimate::exact(via_phi), ToleranceRule::absolute, 1e-10));
    }
    // psi_kappa(theta) = phi_alpha(1 + 4/kappa - sqrt((1 - 4/kappa)^2 - 8 theta/kappa)) where the
    // argument lies in (alpha, alpha + 1).
    const double kap = params.kappa_cle();
    const double b = 1.0 - 4.0 / kap;
    const double theta_max = kap * b * b / 8.0;
    for (int i = 0; i <= 10; ++i) {
      const double theta = -0.5 + (theta_max + 0.5) * 0.95 * i / 10.0;
      const double arg = 1.0 + 4.0 / kap - std::sqrt(b * b - 8.0 * theta / kap);
      const ExtendedReal phi = biggins_transform(params, arg);
      if (!phi.is_finite()) continue;
      nlohmann::ordered_json prm = detail::cascade_params(params);
      prm["kappa"] = kap;
      prm["theta"] = theta;
      out.push_back(make_report("cle_psi_kappa", prm, Estimate::exact(cle_psi_kappa(kap, theta)),
                                Estimate::exact(phi.value()), ToleranceRule::absolute, 1e-10));
    }
  }

  const double x0 = 1.0 / std::tan(std::acos(n_loop / 2.0));
  out.push_back(make_report("nesting_J_root", {{"n", n_loop}, {"x", x0}}, Estimate::exact(nesting_rate_J(n_loop, x0)),
                            Estimate::exact(0.0), ToleranceRule::absolute, 1e-12));
  return out;
}

/// Bessel K series against its integral representation, the psi scaling
/// identity and psi_{alpha,2} against the inverse-Gamma Laplace integral.
inline std::vector<VerificationReport> verify_special_functions(const std::vector<double>& alphas = {1.2, 1.8}) {
  std::vector<VerificationReport> out;
  for (double nu : {0.7, 1.3})
    for (double z : {0.1, 1.0, 5.0}) {
      const double k = bessel_k(nu, z);
      out.push_back(make_report("bessel_k", {{"nu", nu}, {"z", z}}, Estimate::exact(k),
                                Estimate::exact(bessel_k_integral(nu, z), EstimateMethod::quadrature),
                                ToleranceRule::relative, 1e-9));
    }
  for (double a : alphas) {
    const auto params = CascadeParameters::from_alpha(a);
    for (double theta : {1.0, 1.7, 2.2, 3.0})
      for (double x : {0.01, 0.3, 1.0, 4.0, 20.0}) {
        nlohmann::ordered_json prm = detail::cascade_params(params);
        prm["theta"] = theta;
        prm["x"] = x;
        out.push_back(make_report("psi_scaling", prm, Estimate::exact(psi(params, theta, x)),
                                  Estimate::exact(psi(params, 2.0, std::pow(x, 2.0 / theta))),
                                  ToleranceRule::absolute, 1e-12));
      }
    const double nu = params.bessel_order();
    for (double x : {0.1, 0.5, 1.0, 3.0}) {
      QuadratureSpec q;
      q.half_line_scale = 1.0 / std::sqrt(x);
      const auto integral = integrate_half_line(
          [&](double y) { return y <= 0.0 ? 0.0 : std::exp(-x * y - 1.0 / y - (a + 0.5) * std::log(y)); }, q);
      nlohmann::ordered_json prm = detail::cascade_params(params);
      prm["x"] = x;
      out.push_back(make_report("psi_inverse_gamma", prm, Estimate::exact(psi(params, 2.0, x)),
                                Estimate::exact(integral.value / std::tgamma(nu), EstimateMethod::quadrature),
                                ToleranceRule::absolute, 1e-8));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural checks

struct StructuralOptions {
  std::uint64_t walk_runs = 1000;
  std::uint64_t trees = 100;
  std::uint64_t tree_p = 1000;
  std::size_t tree_depth = 4;
  std::uint64_t walk_step_cap = 2'000'000;
};

/// Lukasiewicz decoding of sampled runs (p trees, L_p leaves, T_p vertices),
/// cascade tree invariants, and bit-identical output across worker counts.
inline std::vector<VerificationReport> verify_structural(const StructuralOptions& st = {}, const SuiteOptions& so = {}) {
  std::vector<VerificationReport> out;
  const std::uint64_t seed = derive_seed(so.seed, detail::kTagStructural);
  {
    detail::Stopwatch sw;
    std::vector<NamedStepLaw> laws = finite_battery();
    laws.push_back({"stable_1.2", StepLaw(OffspringLaw::stable_default(1.2))});
    laws.push_back({"stable_1.8", StepLaw(OffspringLaw::stable_default(1.8))});
    std::uint64_t bad = 0, skipped = 0;
    for (std::uint64_t i = 0; i < st.walk_runs; ++i) {
      Rng g = derive_stream(seed, i);
      const auto& law = laws[i % laws.size()];
      const std::uint64_t p = 1 + i % 20;
      const WalkRun run = run_to_hitting(law.step, p, g, st.walk_step_cap, /*record_steps=*/true);
      if (run.truncated) {
        ++skipped;
        continue;
      }
      const ForestShape f = lukasiewicz_decode(run);
      if (f.trees.size() != p || f.leaf_count() != run.L || f.vertex_count() != run.T) ++bad;
    }
    nlohmann::ordered_json prm{{"runs", st.walk_runs}, {"skipped_truncated", skipped}};
    auto r = make_report("lukasiewicz_decode", prm, Estimate::exact(static_cast<double>(bad)), Estimate::exact(0.0),
                         ToleranceRule::absolute, 0.0, seed);
    r.note = "lhs counts runs whose decoding disagrees with (p, L_p, T_p)";
    r.elapsed_ms = sw.ms();
    out.push_back(std::move(r));
  }
  {
    detail::Stopwatch sw;
    std::uint64_t bad = 0;
    for (double alpha : {1.2, 1.8}) {
      const StepLaw step(OffspringLaw::stable_default(alpha));
      GrowOptions go;
      go.max_generation = st.tree_depth;
      go.t_min = std::max<std::uint64_t>(2, st.tree_p / 50);
      go.store_min = std::max<std::uint64_t>(1, go.t_min / 4);  // exercises both explicit and leftover children
      for (std::uint64_t i = 0; i < st.trees; ++i) {
        const CascadeTree t = grow_cascade(st.tree_p, step, go, derive_seed(seed, 1'000'000 + i));
        if (!t.valid()) ++bad;
        // Serialisation must round-trip exactly.
        std::istringstream in(t.to_string());
        if (CascadeTree::read(in).to_string() != t.to_string()) ++bad;
      }
    }
    nlohmann::ordered_json prm{{"trees", 2 * st.trees}, {"p", st.tree_p}, {"depth", st.tree_depth}};
    auto r = make_report("cascade_invariants", prm, Estimate::exact(static_cast<double>(bad)), Estimate::exact(0.0),
                         ToleranceRule::absolute, 0.0, seed);
    r.elapsed_ms = sw.ms();
    out.push_back(std::move(r));
  }
  {
    // Same seed, one worker versus several: reports (without timings) and trees must match byte for byte.
    detail::Stopwatch sw;
    auto run = [&](unsigned workers) {
      SuiteOptions o{so.seed, workers};
      HeavyRwOptions h;
      h.replicates = 400;
      h.alpha_theta = {{1.2, 1.7}};
      std::string s = to_json(verify_rw_identity({}, h, o), false).dump();
      s += to_json(verify_biggins(CascadeParameters::from_alpha(1.8), 2.2, 1000, 2, 400, o), false).dump();
      MalthusianOptions mo;
      mo.p = 300;
      mo.trees = 40;
      mo.depth = 3;
      mo.t_min = 20;
      s += to_json(verify_malthusian_law(CascadeParameters::from_alpha(1.2), mo, o), false).dump();
      const StepLaw step(OffspringLaw::stable_default(1.2));
      GrowOptions go;
      go.max_generation = 3;
      go.t_min = 10;
      const auto trees = parallel_map<std::string>(8, workers, [&](std::size_t i) {
        return grow_cascade(500, step, go, derive_seed(so.seed, i)).to_string();
      });
      for (const auto& t : trees) s += t;
      return s;
    };
    const std::string one = run(1), many = run(4);
    std::size_t diff = one.size() == many.size() ? 0 : 1;
    for (std::size_t i = 0; i < std::min(one.size(), many.size()); ++i) diff += one[i] != many[i];
    nlohmann::ordered_json prm{{"workers", nlohmann::ordered_json::array({1, 4})}, {"bytes", one.size()}};
    auto r = make_report("worker_invariance", prm, Estimate::exact(static_cast<double>(diff)), Estimate::exact(0.0),
                         ToleranceRule::absolute, 0.0, so.seed);
    r.note = "lhs counts differing bytes between the two outputs";
    r.elapsed_ms = sw.ms();
    out.push_back(std::move(r));
  }
  return out;
}

struct LinfOptions {
  std::uint64_t p = 1000;
  std::uint64_t trees = 1000;
  std::size_t k_max = 5;
  double level = 0.1;
  std::uint64_t t_min = 50;
};

/// Empirical P(max_{|u| > k} chi(u)/p >= level) for k = 1..k_max, each at most
/// the value at k - 1. Trees are grown to generation k_max + 1; labels below
/// t_min are not expanded, so the probabilities are lower bounds.
inline std::vector<VerificationReport> verify_linf_diagnostic(const CascadeParameters& params, const LinfOptions& lo = {},
                                                              const SuiteOptions& so = {}) {
  detail::Stopwatch sw;
  const OffspringLaw law = detail::simulation_law(params);
  const StepLaw step(law);
  GrowOptions go;
  go.max_generation = lo.k_max + 1;
  go.t_min = lo.t_min;
  go.store_min = lo.t_min;
  const std::uint64_t seed = derive_seed(so.seed, detail::kTagLinf * 1'000'000 + lo.p);
  const auto maxima = parallel_map<std::vector<double>>(lo.trees, detail::workers_of(so), [&](std::size_t i) {
    const CascadeTree t = grow_cascade(lo.p, step, go, derive_seed(seed, i));
    std::vector<double> m(lo.k_max + 1);
    for (std::size_t k = 1; k <= lo.k_max; ++k) m[k] = t.max_label_beyond(k);
    return m;
  });
  std::vector<Estimate> prob(lo.k_max + 1);
  for (std::size_t k = 1; k <= lo.k_max; ++k) {
    std::vector<double> hit(maxima.size());
    for (std::size_t i = 0; i < maxima.size(); ++i) hit[i] = maxima[i][k] >= lo.level ? 1.0 : 0.0;
    prob[k] = mean_estimate(hit, seed);
  }
  const double ms = sw.ms() / static_cast<double>(std::max<std::size_t>(lo.k_max, 1));
  std::vector<VerificationReport> out;
  for (std::size_t k = 2; k <= lo.k_max; ++k) {
    nlohmann::ordered_json prm = detail::cascade_params(params);
    prm["p"] = lo.p;
    prm["k"] = k;
    prm["level"] = lo.level;
    prm["t_min"] = lo.t_min;
    prm["previous"] = prob[k - 1].value;
    auto r = make_report("linf_tail", prm, prob[k], prob[k - 1], ToleranceRule::at_most, 0.0, seed);
    r.elapsed_ms = ms;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace pcascade
