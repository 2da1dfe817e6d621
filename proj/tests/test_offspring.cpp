#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pcascade/identities/estimate.hpp"
#include "pcascade/offspring.hpp"
#include "pcascade/rng.hpp"

using namespace pcascade;

TEST(Admissibility, QuadraticTakesSmallestRoot) {
  const auto r = solve_admissibility(WeightSequence::from_map({{2, 3.0 / 16.0}}));
  EXPECT_NEAR(r.z, 4.0 / 3.0, 1e-12 * 4.0 / 3.0);
  EXPECT_FALSE(r.tangent);
}

TEST(Admissibility, DoubleRootIsFlagged) {
  const auto r = solve_admissibility(WeightSequence::from_map({{2, 0.25}}));
  EXPECT_NEAR(r.z, 2.0, 1e-6);  // a double root is only located to ~sqrt(eps)
  EXPECT_TRUE(r.tangent);
}

TEST(Admissibility, LinearCase) {
  EXPECT_NEAR(solve_admissibility(WeightSequence::from_map({{1, 0.5}})).z, 2.0, 2e-12);
}

TEST(Admissibility, NoRootThrows) {
  EXPECT_THROW(solve_admissibility(WeightSequence::from_map({{2, 1.0}})), NotAdmissible);
  EXPECT_THROW(solve_admissibility(WeightSequence::from_map({{1, 1.5}})), NotAdmissible);
}

TEST(MuFromWeights, CriticalSubcriticalAndEmpty) {
  const auto crit = OffspringLaw::from_weights(WeightSequence::from_map({{2, 0.25}}), 2.0);
  EXPECT_DOUBLE_EQ(crit.pmf(0), 0.5);
  EXPECT_DOUBLE_EQ(crit.pmf(2), 0.5);
  EXPECT_TRUE(crit.is_critical());

  const auto sub = mu_from_weights(WeightSequence::from_map({{2, 3.0 / 16.0}}));
  EXPECT_NEAR(sub.pmf(0), 0.75, 1e-12);
  EXPECT_NEAR(sub.pmf(2), 0.25, 1e-12);
  EXPECT_NEAR(sub.mean(), 0.5, 1e-12);
  EXPECT_FALSE(sub.is_critical());

  const auto empty = mu_from_weights(WeightSequence::from_map({}));
  EXPECT_EQ(empty.pmf(0), 1.0);
  EXPECT_EQ(*empty.z_g(), 1.0);
  Rng g(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample(empty, g), 0u);
}

TEST(MuFromWeights, WrongRootIsRejected) {
  EXPECT_THROW(OffspringLaw::from_weights(WeightSequence::from_map({{2, 0.25}}), 3.0), NotAdmissible);
}

TEST(Weights, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "pcascade_weights_test.txt";
  {
    std::ofstream f(path);
    f << "# ghat_k\n2 0.1875\n\n";
  }
  const auto w = load_weights(path.string());
  EXPECT_EQ(w.entry(1), 0.0);
  EXPECT_EQ(w.entry(2), 0.1875);
  EXPECT_NEAR(solve_admissibility(w).z, 4.0 / 3.0, 1e-11);
  std::filesystem::remove(path);
}

TEST(Stable, FirstProbabilities) {
  const auto law = stable_offspring(1.8, 0.5);
  EXPECT_DOUBLE_EQ(law.pmf(0), 0.5);
  EXPECT_NEAR(law.pmf(1), 0.1, 1e-15);
  EXPECT_NEAR(law.pmf(2), 0.36, 1e-15);
}

TEST(Stable, MatchesGammaFunctionCoefficients) {
  // (-1)^k binom(alpha, k) = Gamma(k - alpha) / (Gamma(-alpha) Gamma(k + 1)).
  for (double a : {1.2, 1.8}) {
    const double gamma = 1.0 / a;
    const auto law = OffspringLaw::stable(a, gamma, 20'000);
    for (std::uint64_t k : {2, 3, 7, 50, 1000, 19'999}) {
      const double ref = gamma * std::exp(std::lgamma(k - a) - std::lgamma(k + 1.0)) / std::tgamma(-a);
      EXPECT_NEAR(law.pmf(k) / ref, 1.0, 1e-11) << a << ' ' << k;
    }
  }
}

TEST(Stable, MassMeanAndTail) {
  for (double a : {1.2, 1.5 + 1e-9, 1.8}) {
    const auto law = OffspringLaw::stable_default(a);
    EXPECT_NEAR(law.total_mass(), 1.0, 1e-12) << a;
    EXPECT_NEAR(law.mean(), 1.0, 1e-10) << a;
    EXPECT_TRUE(law.is_critical());
    EXPECT_DOUBLE_EQ(law.tail_index(), a + 1.0);

    // Log-log regression over [1e2, 1e4].
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double k = 100; k <= 10'000; k *= 1.1) {
      const double x = std::log(k), y = std::log(law.pmf(static_cast<std::uint64_t>(k)));
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(-slope / (a + 1.0), 1.0, 0.02) << a;

    const double c3 = law.pmf(1000) * std::pow(1000.0, a + 1.0), c4 = law.pmf(10'000) * std::pow(1e4, a + 1.0);
    EXPECT_NEAR(c3 / c4, 1.0, 0.05);
  }
}

TEST(Stable, RejectsLargeGamma) {
  EXPECT_THROW(stable_offspring(1.8, 0.6), DomainError);
  EXPECT_THROW(stable_offspring(2.2, 0.1), DomainError);
}

TEST(Sampling, ChiSquareGoodnessOfFit) {
  const auto law = OffspringLaw::stable_default(1.2);
  constexpr int kBins = 52;  // 0..50 and > 50
  std::vector<double> expected(kBins);
  double below = 0.0;
  for (int k = 0; k <= 50; ++k) below += expected[k] = law.pmf(k);
  expected[51] = law.total_mass() - below;

  const int n = 1'000'000;
  std::vector<double> obs(kBins, 0.0);
  Rng g(2024);
  for (int i = 0; i < n; ++i) {
    const auto k = sample(law, g);
    obs[k > 50 ? 51 : k] += 1;
  }
  double chi2 = 0.0;
  int dof = -1;
  for (int b = 0; b < kBins; ++b) {
    const double e = expected[b] * n;
    if (e == 0.0) {  // one child has probability zero for this law
      EXPECT_EQ(obs[b], 0.0) << "bin " << b;
      continue;
    }
    chi2 += (obs[b] - e) * (obs[b] - e) / e;
    ++dof;
  }
  const boost::math::chi_squared dist(dof);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001) << "chi2 = " << chi2;
}

TEST(Sampling, MeanByMedianOfMeans) {
  const auto law = OffspringLaw::stable_default(1.8);
  Rng g(99);
  std::vector<double> xs(1'000'000);
  for (auto& x : xs) x = static_cast<double>(sample(law, g));
  const Estimate e = median_of_means(xs, 99);
  EXPECT_LE(std::fabs(e.value - 1.0), 3.0 * e.stderr_) << e.value << " +- " << e.stderr_;
}

TEST(Sampling, TailBeyondCutoffIsPareto) {
  // Conditioned on exceeding the table, P(k >= 2K | k > K) = 2^{-alpha}.
  const double a = 1.2;
  const auto law = OffspringLaw::stable_default(a, 1000);
  Rng g(7);
  int far = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) far += law.sample_above(1000, g) >= 2002;
  EXPECT_NEAR(static_cast<double>(far) / n, std::pow(2.0, -a), 4 * std::sqrt(0.25 / n) + 1e-3);
}

TEST(Sampling, Reproducible) {
  const auto law = OffspringLaw::stable_default(1.2);
  Rng a = derive_stream(3, 17), b = derive_stream(3, 17), c = derive_stream(3, 18);
  std::vector<std::uint64_t> xa, xb, xc;
  for (int i = 0; i < 1000; ++i) {
    xa.push_back(sample(law, a));
    xb.push_back(sample(law, b));
    xc.push_back(sample(law, c));
  }
  EXPECT_EQ(xa, xb);
  EXPECT_NE(xa, xc);
}
