#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "pcascade/identities/estimate.hpp"
#include "pcascade/rng.hpp"
#include "pcascade/walk.hpp"

using namespace pcascade;

namespace {

const StepLaw kPm1 = StepLaw::plus_minus_one();
const StepLaw kLazy = StepLaw::from_steps({{-1, 0.4}, {0, 0.3}, {1, 0.2}, {2, 0.1}});
const StepLaw kSub = StepLaw::from_steps({{-1, 0.6}, {0, 0.2}, {2, 0.2}});

// Chi-square p-value of first-passage times T_1 of the simple walk against the
// exact law, over the bins {1, 3, ..., 41, > 41}.
template <class Draw>
double t1_goodness_of_fit(Draw&& draw, int n) {
  const auto exact = kemperman_table(kPm1, 1, 41);
  std::vector<double> expected, observed(22, 0.0);
  double below = 0.0;
  for (std::uint64_t t = 1; t <= 41; t += 2) {
    expected.push_back(exact[t - 1].lhs);
    below += exact[t - 1].lhs;
  }
  expected.push_back(1.0 - below);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t t = draw(i);
    observed[t > 41 ? 21 : (t - 1) / 2] += 1;
  }
  double chi2 = 0.0;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    const double e = expected[b] * n;
    chi2 += (observed[b] - e) * (observed[b] - e) / e;
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(expected.size() - 1.0), chi2));
}

}  // namespace

TEST(StepLaw, ShiftOfOffspring) {
  EXPECT_EQ(kPm1.prob(-1), 0.5);
  EXPECT_EQ(kPm1.prob(0), 0.0);
  EXPECT_NEAR(kLazy.mean(), 0.0, 1e-15);
  EXPECT_LT(kSub.mean(), 0.0);
  const StepLaw heavy(OffspringLaw::stable_default(1.2));
  EXPECT_FALSE(heavy.finite_support());
  EXPECT_NEAR(heavy.mean(), 0.0, 1e-10);
  EXPECT_THROW(StepLaw::from_steps({{0, 1.0}}), DomainError);             // never steps down
  EXPECT_THROW(StepLaw::from_steps({{-1, 0.3}, {1, 0.7}}), DomainError);  // drifts up
}

TEST(RunToHitting, DeterministicDescent) {
  Rng g(1);
  const WalkRun r = run_to_hitting(StepLaw::descent(), 7, g);
  EXPECT_EQ(r.T, 7u);
  EXPECT_EQ(r.L, 7u);
  EXPECT_TRUE(r.jumps.empty());
  EXPECT_FALSE(r.truncated);
}

TEST(RunToHitting, FirstPassageLawMatchesDp) {
  EXPECT_GT(t1_goodness_of_fit(
                [](int i) {
                  Rng g = derive_stream(11, i);
                  const WalkRun r = run_to_hitting(kPm1, 1, g, 43);
                  return r.truncated ? std::uint64_t{1000} : r.T;
                },
                100'000),
            0.001);
}

TEST(SampleForest, FirstPassageLawMatchesDp) {
  EXPECT_GT(t1_goodness_of_fit(
                [](int i) {
                  Rng g = derive_stream(12, i);
                  // Truncation happens a whole generation at a time, so a capped
                  // run reports T below the cap; send it to the tail bin.
                  ForestOptions opt;
                  opt.step_cap = 43;
                  const WalkRun r = sample_forest(kPm1.offspring(), 1, g, opt).run;
                  return r.truncated ? std::uint64_t{1000} : r.T;
                },
                100'000),
            0.001);
}

TEST(RunToHitting, PlusMinusOneLeafCount) {
  // Down-steps minus up-steps equals p, so 2L = T + p on every completed run.
  for (std::size_t i = 0; i < 10'000; ++i) {
    Rng g = derive_stream(13, i);
    const WalkRun r = run_to_hitting(kPm1, 3, g, 100'000);
    if (r.truncated) continue;
    ASSERT_EQ(2 * r.L, r.T + 3);
  }
}

TEST(RunToHitting, InvariantsAndParity) {
  for (const StepLaw* law : {&kPm1, &kLazy, &kSub})
    for (int i = 0; i < 300; ++i) {
      Rng g = derive_stream(14, i);
      const std::uint64_t p = 1 + i % 6;
      const WalkRun r = run_to_hitting(*law, p, g, 1'000'000, true);
      if (r.truncated) continue;
      long long sum = 0;
      for (auto x : r.steps) sum += x;
      ASSERT_EQ(sum, -static_cast<long long>(p));
      ASSERT_GE(r.L, p);
      ASSERT_GE(r.T, p);
      ASSERT_EQ(r.T, r.L + r.jumps.size());
      if (law == &kPm1) {
        ASSERT_EQ((r.T - p) % 2, 0u);
      }
    }
}

TEST(RunToHitting, StepCapFlagsTruncation) {
  Rng g(4);
  const WalkRun r = run_to_hitting(StepLaw(OffspringLaw::stable_default(1.2)), 1000, g, 1000);
  EXPECT_EQ(r.T, 1000u);
  EXPECT_TRUE(r.truncated || r.L == 1000u);
  EXPECT_THROW(run_to_hitting(kPm1, 5, g, 4), DomainError);
}

TEST(Lukasiewicz, HandDecodedExamples) {
  const ForestShape two = lukasiewicz_decode({-1, -1}, 2);
  ASSERT_EQ(two.trees.size(), 2u);
  EXPECT_EQ(two.trees[0], std::vector<std::uint64_t>{0});
  EXPECT_EQ(two.trees[1], std::vector<std::uint64_t>{0});

  const ForestShape cherry = lukasiewicz_decode({1, -1, -1}, 1);
  ASSERT_EQ(cherry.trees.size(), 1u);
  EXPECT_EQ(cherry.trees[0], (std::vector<std::uint64_t>{2, 0, 0}));
  EXPECT_EQ(cherry.leaf_count(), 2u);

  EXPECT_THROW(lukasiewicz_decode({1, -1}, 1), DomainError);
  EXPECT_THROW(lukasiewicz_decode({-1, -1}, 1), DomainError);
}

TEST(Lukasiewicz, RandomRunsRoundTrip) {
  const StepLaw heavy(OffspringLaw::stable_default(1.5 + 0.3));
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Rng g = derive_stream(15, i);
    const std::uint64_t p = 1 + i % 20;
    const WalkRun r = run_to_hitting(i % 2 ? kLazy : heavy, p, g, 2'000'000, true);
    if (r.truncated) continue;
    const ForestShape f = lukasiewicz_decode(r);
    ASSERT_EQ(f.trees.size(), p);
    ASSERT_EQ(f.leaf_count(), r.L);
    ASSERT_EQ(f.vertex_count(), r.T);
    ASSERT_EQ(lukasiewicz_encode(f), r.steps);
    ++checked;
  }
  EXPECT_GT(checked, 950);
}

TEST(Kemperman, SmallCases) {
  const auto one = kemperman_check(kPm1, 1, 1);
  EXPECT_EQ(one.lhs, 0.5);
  EXPECT_EQ(one.rhs, 0.5);
  const auto three = kemperman_check(kPm1, 1, 3);
  EXPECT_DOUBLE_EQ(three.lhs, 0.125);
  EXPECT_DOUBLE_EQ(three.rhs, 0.125);
  const auto four = kemperman_check(kPm1, 2, 4);
  EXPECT_NEAR(four.lhs, four.rhs, 1e-14);
  EXPECT_NEAR(four.lhs, 0.125, 1e-15);  // paths (+,-,-,-) ... two of 16
}

TEST(Kemperman, BatteryExactness) {
  for (const StepLaw* law : {&kPm1, &kLazy, &kSub})
    for (std::uint64_t p = 1; p <= 8; ++p)
      for (const auto& row : kemperman_table(*law, p, 60)) ASSERT_NEAR(row.lhs, row.rhs, 1e-13) << p << ' ' << row.n;
}

TEST(RwIdentity, ZeroFunction) {
  const auto v = rw_identity_lhs_oracle(kPm1, [](std::int64_t) { return 0.0; }, 2, 1000);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(rw_identity_rhs(kPm1, [](std::int64_t) { return 0.0; }, 2), 0.0);
}

TEST(RwIdentity, SimpleWalkFourThirds) {
  const auto one = [](std::int64_t) { return 1.0; };
  const auto v = rw_identity_lhs_oracle(kPm1, one, 2, 20'000);
  const double rhs = rw_identity_rhs(kPm1, one, 2);
  EXPECT_NEAR(rhs, 4.0 / 3.0, 1e-15);
  EXPECT_LE(std::fabs(v.value - rhs), v.tail_bound + 1e-10);
  EXPECT_LT(v.tail_bound, 0.05);
}

TEST(RwIdentity, DeterministicWalk) {
  const auto leaf = [](std::int64_t x) { return x == -1 ? 1.0 : 0.0; };
  const auto v = rw_identity_lhs_oracle(StepLaw::descent(), leaf, 3, 100);
  EXPECT_NEAR(v.value, 1.5, 1e-15);
  EXPECT_EQ(v.survival, 0.0);
  EXPECT_NEAR(rw_identity_rhs(StepLaw::descent(), leaf, 3), 1.5, 1e-15);
}

TEST(RwIdentity, SeveralFunctionsAtOnceMatchSeparateRuns) {
  const std::vector<StepFunction> fs = {[](std::int64_t) { return 1.0; },
                                        [](std::int64_t x) { return double((x + 1) * (x + 1)); }};
  const auto both = rw_identity_lhs_oracle(kLazy, fs, 5, 3000);
  for (std::size_t k = 0; k < fs.size(); ++k)
    EXPECT_DOUBLE_EQ(both[k].value, rw_identity_lhs_oracle(kLazy, fs[k], 5, 3000).value);
}

TEST(RwIdentity, HeavyRhsByTailCorrectedSum) {
  // f = 1{x = -1}: the right side is mu(0) p / (p - 1).
  const StepLaw heavy(OffspringLaw::stable_default(1.2));
  EXPECT_NEAR(rw_identity_rhs(heavy, [](std::int64_t x) { return x == -1 ? 1.0 : 0.0; }, 10),
              (1.0 / 1.2) * 10.0 / 9.0, 1e-12);
}

namespace {

void check_extension(const PairFunction& f, std::uint64_t seed) {
  const int n = 100'000;
  std::vector<double> l(n), r(n);
  for (int i = 0; i < n; ++i) {
    Rng g = derive_stream(seed, i);
    // The pair frequencies have settled long before the cap; the walk itself
    // has infinite mean length.
    const auto s = extended_identity_sample(kPm1, f, 3, g, 100'000);
    l[i] = s.lhs;
    r[i] = s.rhs;
  }
  const Estimate a = mean_estimate(l, seed), b = mean_estimate(r, seed);
  EXPECT_LE(std::fabs(a.value - b.value), 3 * (a.stderr_ + b.stderr_)) << a.value << " vs " << b.value;
}

}  // namespace

TEST(ExtendedIdentity, ConstantPairFunction) {
  check_extension([](std::int64_t, std::int64_t) { return 1.0; }, 21);
}

TEST(ExtendedIdentity, BothStepsDown) {
  check_extension([](std::int64_t x, std::int64_t y) { return x == -1 && y == -1 ? 1.0 : 0.0; }, 22);
}

TEST(ExtendedIdentity, ZeroFunction) {
  Rng g(3);
  for (int i = 0; i < 100; ++i) {
    const auto s = extended_identity_sample(kPm1, [](std::int64_t, std::int64_t) { return 0.0; }, 3, g);
    EXPECT_EQ(s.lhs, 0.0);
    EXPECT_EQ(s.rhs, 0.0);
  }
}

TEST(LeafFraction, DeviationsBecomeRarer) {
  // Fraction of runs with |L_p/T_p - mu(0)| >= p^{-alpha/4}, alpha = 1.8.
  const double a = 1.8;
  const OffspringLaw law = OffspringLaw::stable_default(a);
  std::vector<double> frac;
  for (std::uint64_t p : {100, 1000, 10'000}) {
    int bad = 0;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      Rng g = derive_stream(23 + p, i);
      const auto d = sample_forest(law, p, g);
      const double dev = std::fabs(double(d.run.L) / double(d.run.T) - law.pmf(0));
      bad += dev >= std::pow(double(p), -a / 4);
    }
    frac.push_back(double(bad) / n);
  }
  EXPECT_LE(frac[1], frac[0] + 0.02);
  EXPECT_LE(frac[2], frac[1] + 0.02);
}
