#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "pcascade/analytic.hpp"

using namespace pcascade;
using std::numbers::pi;

namespace {

CascadeParameters A(double alpha) { return CascadeParameters::from_alpha(alpha); }

// First sign change of f on [lo, hi] by bisection; the bracket must change sign.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Parameters, LoopWeightAndKappaRoundTrip) {
  for (double a : {1.05, 1.2, 1.45, 1.55, 1.8, 1.95}) {
    const auto p = A(a);
    const auto back = CascadeParameters::from_loop_weight(p.loop_weight(), p.phase());
    EXPECT_NEAR(back.alpha(), a, 1e-14);
    EXPECT_NEAR(CascadeParameters::from_kappa(p.kappa_cle()).alpha(), a, 1e-14);
  }
  // n = 1: alpha = 3/2 -+ 1/3.
  EXPECT_NEAR(CascadeParameters::from_loop_weight(1.0, Phase::dense).alpha(), 1.5 - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(CascadeParameters::from_loop_weight(1.0, Phase::dilute).alpha(), 1.5 + 1.0 / 3.0, 1e-15);
}

TEST(Parameters, RejectsCriticalAndOutOfRange) {
  EXPECT_THROW(A(1.5), DomainError);
  EXPECT_THROW(A(1.0), DomainError);
  EXPECT_THROW(A(2.0), DomainError);
  EXPECT_NO_THROW(CascadeParameters::for_tabulation(1.5));
  EXPECT_THROW(CascadeParameters::from_loop_weight(2.0, Phase::dense), DomainError);
  EXPECT_THROW(CascadeParameters::from_kappa(4.0), DomainError);
  EXPECT_THROW(CascadeParameters::from_alpha(1.2, -1.0), DomainError);
}

TEST(Biggins, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(biggins_transform(A(1.8), 2.0).value(), 1.0);
  for (double a : {1.1, 1.3, 1.7, 1.9})
    EXPECT_NEAR(biggins_transform(A(a), 2 * a - 1 > a + 1 ? 2.0 : 2 * a - 1).value(), 1.0, 1e-12);
  EXPECT_NEAR(biggins_transform(A(1.8), 2.2).value(), std::sin(0.2 * pi) / std::sin(0.4 * pi), 1e-15);
  EXPECT_NEAR(biggins_transform(A(1.8), 2.2).value(), 0.6180340, 1e-7);
  EXPECT_NEAR(biggins_transform(A(1.2), 1.7).value(), 0.5877853, 1e-7);
  EXPECT_TRUE(biggins_transform(A(1.8), 1.5).is_infinite());
  EXPECT_TRUE(biggins_transform(A(1.8), 2.8).is_infinite());
  EXPECT_THROW(biggins_transform(A(1.8), 1.5).value(), DomainError);
}

TEST(Biggins, InverseOnDecreasingBranch) {
  EXPECT_NEAR(biggins_inverse(A(1.8), 1.0), 2.0, 1e-12);
  EXPECT_NEAR(biggins_inverse(A(1.2), 1.0), 1.4, 1e-12);
  EXPECT_NEAR(biggins_inverse(A(1.8), biggins_transform(A(1.8), 2.2).value()), 2.2, 1e-12);
  for (double a : {1.2, 1.8}) {
    const auto p = A(a);
    const double lo = std::sin(pi * (2 - a));
    for (double y = lo; y <= 1.0; y += (1.0 - lo) / 17)
      EXPECT_NEAR(biggins_transform(p, biggins_inverse(p, y)).value(), y, 1e-12);
    EXPECT_THROW(biggins_inverse(p, 0.99 * lo), DomainError);
  }
}

TEST(Biggins, MalthusianParameter) {
  EXPECT_EQ(malthusian_parameter(A(1.8)), 2.0);
  EXPECT_NEAR(malthusian_parameter(A(1.2)), 1.4, 1e-15);
  EXPECT_NEAR(malthusian_parameter(A(1.5 - 1e-12)), 2.0, 1e-11);
  EXPECT_EQ(malthusian_parameter(A(1.5 + 1e-12)), 2.0);
}

TEST(RateFunction, ValueMonotonicityAndNegativeRoot) {
  EXPECT_NEAR(rate_function(A(1.8), 0.0), -std::log(std::sin(0.2 * pi)), 1e-14);
  EXPECT_NEAR(rate_function(A(1.8), 0.0), 0.531394, 1e-6);
  for (double a : {1.2, 1.8}) {
    const auto p = A(a);
    double prev = rate_function(p, -5.0);
    for (double x = -4.99; x <= 5.0; x += 0.01) {
      const double v = rate_function(p, x);
      ASSERT_GT(v, prev) << "x = " << x;
      prev = v;
    }
    EXPECT_LT(bisect([&](double x) { return rate_function(p, x); }, -50.0, 0.0), 0.0);
    EXPECT_GT(rate_function(p, 0.0), 0.0);
  }
}

TEST(Legendre, LinearFunctionAtItsSlope) {
  const double c = 1.7;
  EXPECT_NEAR(legendre_numeric([&](double t) { return c * t; }, c, -3.0, 3.0).value, 0.0, 1e-12);
}

TEST(Legendre, MatchesRateFunction) {
  for (double a : {1.2, 1.8}) {
    const auto p = A(a);
    auto logphi = [&](double t) { return std::log(biggins_transform(p, t).value()); };
    for (double x = -1.5; x <= 1.5; x += 0.25)
      EXPECT_NEAR(legendre_numeric(logphi, x, a + 1e-7, a + 1 - 1e-7).value, rate_function(p, x), 1e-8)
          << "alpha " << a << " x " << x;
  }
}

TEST(Legendre, RejectsConvexObjective) {
  // theta x - (-theta^2) is convex: no interior maximum.
  EXPECT_THROW(legendre_numeric([](double t) { return -t * t; }, 0.0, -1.0, 1.0), NonConcaveError);
}

TEST(Bessel, AgreesWithBoost) {
  for (double nu : {0.3, 0.7, 1.3, 1.7})
    for (double z : {1e-3, 0.1, 1.0, 5.0, 9.99, 10.0, 10.01, 30.0, 300.0}) {
      const double ref = boost::math::cyl_bessel_k(nu, z);
      EXPECT_NEAR(bessel_k(nu, z) / ref, 1.0, 1e-9) << "nu " << nu << " z " << z;
    }
}

TEST(Bessel, SeriesAndIntegralAgreeAcrossCutoff) {
  for (double nu : {0.7, 1.3})
    for (double z : {0.5, 3.0, 9.0})
      EXPECT_NEAR(bessel_k_integral(nu, z) / bessel_k(nu, z), 1.0, 1e-9);
}

TEST(Bessel, DomainChecks) {
  EXPECT_THROW(bessel_k(0.5, -1.0), DomainError);
  EXPECT_THROW(bessel_k(2.0, 1.0), DomainError);
  EXPECT_NEAR(bessel_k(2.5, 1.0) / boost::math::cyl_bessel_k(2.5, 1.0), 1.0, 1e-9);
}

TEST(Psi, DefinitionAgainstBoostBessel) {
  for (double a : {1.2, 1.8}) {
    const auto p = A(a);
    const double nu = a - 0.5;
    for (double theta : {1.0, 1.4, 2.0})
      for (double x : {0.01, 0.3, 1.0, 4.0, 40.0}) {
        const double w = std::pow(x, 1.0 / theta);
        const double ref = 2.0 / std::tgamma(nu) * std::pow(x, nu / theta) * boost::math::cyl_bessel_k(nu, 2 * w);
        EXPECT_NEAR(psi(p, theta, x), ref, 1e-12 + 1e-10 * ref) << a << ' ' << theta << ' ' << x;
        EXPECT_NEAR(psi_complement(p, theta, x), 1.0 - ref, 1e-12);
      }
  }
}

TEST(Psi, LaplaceTransformShape) {
  const auto p = A(1.2);
  EXPECT_EQ(psi(p, 1.0, 0.0), 1.0);
  double prev = 1.0;
  for (double x = 0.05; x < 20; x *= 1.3) {
    const double v = psi(p, 1.0, x);
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 0.0);
    prev = v;
  }
  EXPECT_THROW(psi(p, 1.0, -1.0), DomainError);
}

TEST(Psi, DiluteLimitIsInverseGamma) {
  // W ~ inverse-Gamma(alpha - 1/2, alpha - 3/2): integrate e^{-xw} against its density.
  const auto p = A(1.8);
  const double a = 1.3, b = 0.3;
  boost::math::quadrature::exp_sinh<double> q;
  for (double x : {0.5, 1.0, 2.0}) {
    const double ref = q.integrate([&](double w) {
      if (w <= 0) return 0.0;
      return std::exp(a * std::log(b) - std::lgamma(a) - (a + 1) * std::log(w) - b / w - x * w);
    });
    EXPECT_NEAR(malthusian_limit_laplace(p, x), ref, 1e-9) << x;
  }
}

TEST(Psi, DenseLimitMeanIsOne) {
  // 1 - L(h) ~ h E[W] as h -> 0, and E[W] = 1 for the martingale limit.
  for (double a : {1.2, 1.8}) {
    const double h = 1e-30;
    EXPECT_NEAR(malthusian_limit_laplace_complement(A(a), h) / h, 1.0, 1e-6) << a;
  }
}

TEST(Levy, JumpMomentClosedFormVsQuadrature) {
  for (auto [a, th] : {std::pair{1.2, 1.7}, std::pair{1.8, 2.2}, std::pair{1.8, 2.7}}) {
    const auto p = A(a);
    const double closed = stable_jump_moment(p, th).value();
    EXPECT_NEAR(stable_jump_moment_quadrature(p, th).value / closed, 1.0, 1e-9);
  }
  EXPECT_THROW(stable_jump_moment(A(1.8), 1.7), DomainError);
}

TEST(Levy, ScaleCancelsInRatios) {
  const auto p1 = CascadeParameters::from_alpha(1.8, 1.0);
  const auto p3 = CascadeParameters::from_alpha(1.8, 3.0);
  EXPECT_NEAR(stable_jump_moment(p3, 2.2).value() / expected_inverse_tau(p3),
              stable_jump_moment(p1, 2.2).value() / expected_inverse_tau(p1), 1e-15);
  EXPECT_NEAR(expected_inverse_tau_quadrature(p1).value, expected_inverse_tau(p1), 1e-9);
  // The ratio is phi_alpha(theta) whatever C is.
  const double ratio = stable_jump_moment(p1, 2.2).value() / expected_inverse_tau(p1);
  EXPECT_NEAR(ratio, biggins_transform(p1, 2.2).value(), 1e-12);
}

TEST(Nesting, RootOfJAndMinimumForNEqualOne) {
  for (double n : {0.3, 1.0, 1.7}) {
    const double root = 1.0 / std::tan(std::acos(n / 2));
    EXPECT_NEAR(nesting_rate_J(n, root), 0.0, 1e-12);
  }
  // J is minimal (= 0) at 1/sqrt(3) for n = 1.
  const double m = 1.0 / std::sqrt(3.0);
  EXPECT_GT(nesting_rate_J(1.0, m - 1e-3), 0.0);
  EXPECT_GT(nesting_rate_J(1.0, m + 1e-3), 0.0);
  EXPECT_THROW(nesting_rate_J(1.0, 0.0), DomainError);
}

TEST(Nesting, KappaIsShiftedInverseBiggins) {
  for (double a : {1.2, 1.8}) {
    const auto p = A(a);
    const double edge = std::log(2.0 / p.loop_weight());
    for (double l = -2.0; l < edge - 0.01; l += 0.1)
      EXPECT_NEAR(nesting_kappa(p, l).value(), biggins_inverse(p, std::exp(-l)) - p.malthusian(), 1e-10) << l;
    EXPECT_TRUE(nesting_kappa(p, edge + 1e-9).is_infinite());
  }
}

TEST(Nesting, CosineAndCoshBranchesJoin) {
  const double kappa = 6.0;  // b = 1/3, radicand zero at theta = b^2 kappa / 8
  const double t0 = (1.0 / 9.0) * kappa / 8.0;
  EXPECT_NEAR(cle_psi_kappa(kappa, t0 - 1e-9), cle_psi_kappa(kappa, t0 + 1e-9), 1e-7);
}

TEST(Nesting, PsiKappaAgreesWithBiggins) {
  // psi_kappa(t) = phi_alpha(1 + 4/kappa - sqrt((1 - 4/kappa)^2 - 8t/kappa)).
  for (double a : {1.2, 1.8}) {
    const auto p = A(a);
    const double k = p.kappa_cle(), b = 1 - 4 / k;
    for (double t = -0.4; t < 0.9 * k * b * b / 8; t += 0.02) {
      const double arg = 1 + 4 / k - std::sqrt(b * b - 8 * t / k);
      const auto phi = biggins_transform(p, arg);
      if (phi.is_finite()) {
        EXPECT_NEAR(cle_psi_kappa(k, t), phi.value(), 1e-10) << a << ' ' << t;
      }
    }
  }
}

TEST(Cumulant, RootAtTwiceX) {
  for (double a : {1.2, 1.8})
    for (double x : {0.5, 1.0, 2.0}) EXPECT_LE(std::fabs(cumulant_kappa_psi(A(a), x, 2 * x).value), 1e-8);
}

TEST(ExtendedReal, InfinityIsTagged) {
  const auto inf = ExtendedReal::infinity();
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_TRUE(std::isinf(inf.to_double()));
  EXPECT_EQ(inf, ExtendedReal::infinity());
  EXPECT_FALSE(ExtendedReal(1.0) == inf);
}
