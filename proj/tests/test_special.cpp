#include "mppv/special.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace mppv {
namespace {

TEST(LogGamma, MatchesFactorials) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-13);
  EXPECT_NEAR(log_factorial(10), std::log(3628800.0), 1e-12);
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(log_factorial(-1), DomainError);
}

TEST(RegularizedGamma, KnownValues) {
  // P(1,x) = 1 - exp(-x).
  EXPECT_NEAR(regularized_gamma_p(1.0, 0.5), 1.0 - std::exp(-0.5), 1e-14);
  // P(2,x) = 1 - exp(-x)(1+x): Erlang(2) cdf at unit rate.
  EXPECT_NEAR(regularized_gamma_p(2.0, 1.0), 1.0 - 2.0 * std::exp(-1.0), 1e-14);
  // Chi-square with 1 dof: P(1/2, x/2) = 2 Phi(sqrt(x)) - 1.
  EXPECT_NEAR(regularized_gamma_p(0.5, 0.5), 2.0 * normal_cdf(1.0) - 1.0, 1e-13);
  EXPECT_NEAR(regularized_gamma_p(3.0, 0.0), 0.0, 0.0);
  EXPECT_NEAR(regularized_gamma_q(3.0, 0.0), 1.0, 0.0);
  for (double a : {0.3, 1.0, 2.5, 17.0}) {
    for (double x : {0.01, 0.6, 3.0, 40.0}) {
      EXPECT_NEAR(regularized_gamma_p(a, x) + regularized_gamma_q(a, x), 1.0, 1e-13);
    }
  }
}

TEST(NormalCdf, SymmetryAndTails) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal_cdf(1.0), 0.841344746068543, 1e-14);
  EXPECT_NEAR(normal_cdf(-1.0) + normal_cdf(1.0), 1.0, 1e-15);
  EXPECT_NEAR(normal_sf(3.0), 1.0 - normal_cdf(3.0), 1e-15);
}

TEST(NormalQuantile, RoundTrip) {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14 + 1e-12 * p) << "p=" << p;
  }
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-11);
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(GammaQuantile, RoundTrip) {
  for (double shape : {0.4, 1.0, 2.0, 5.0, 11.0}) {
    for (double p : {1e-14, 1e-8, 0.05, 0.5, 0.95, 1.0 - 1e-10}) {
      const double x = gamma_quantile(shape, 1.0, p);
      EXPECT_NEAR(regularized_gamma_p(shape, x), p, 1e-11 + 1e-10 * p)
          << "shape=" << shape << " p=" << p;
    }
  }
  // Rate scaling: quantile of Gamma(a, rate) is quantile of Gamma(a, 1) / rate.
  EXPECT_NEAR(gamma_quantile(2.0, 4.0, 0.3), gamma_quantile(2.0, 1.0, 0.3) / 4.0, 1e-13);
  // Exponential special case: -log(1-p).
  EXPECT_NEAR(gamma_quantile(1.0, 1.0, 0.2), -std::log(0.8), 1e-13);
  EXPECT_EQ(gamma_quantile(3.0, 2.0, 0.0), 0.0);
}

TEST(Kolmogorov, KnownTailValues) {
  // Q(lambda) at textbook points.
  EXPECT_NEAR(kolmogorov_sf(1.0), 0.26999967168735, 1e-10);
  EXPECT_NEAR(kolmogorov_sf(1.6276), 0.0099999, 2e-5);
  EXPECT_NEAR(kolmogorov_sf(0.5), 0.9639452436648751, 1e-10);
  EXPECT_EQ(kolmogorov_sf(0.0), 1.0);
  // Branch continuity near the switch point.
  EXPECT_NEAR(kolmogorov_sf(1.18 - 1e-9), kolmogorov_sf(1.18 + 1e-9), 1e-8);
}

TEST(KsPValue, MonotoneAndCriticalValue) {
  EXPECT_GT(ks_p_value(100, 0.05), ks_p_value(100, 0.10));
  const double crit = ks_critical_value(1000, 0.01);
  EXPECT_NEAR(ks_p_value(1000, crit), 0.01, 1e-6);
  // Large-n critical statistic approaches 1.6276 / sqrt(n).
  EXPECT_NEAR(ks_critical_value(1000000, 0.01), 1.6276 / 1000.0, 2e-6);
}

TEST(ChiSquare, MatchesExponentialIdentity) {
  // With 2 dof the tail is exp(-x/2).
  EXPECT_NEAR(chi_square_sf(2.0, 3.0), std::exp(-1.5), 1e-13);
  EXPECT_EQ(chi_square_sf(4.0, 0.0), 1.0);
}

}  // namespace
}  // namespace mppv
