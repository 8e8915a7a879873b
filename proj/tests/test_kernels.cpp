#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mppv/errors.hpp"
#include "mppv/kernels.hpp"
#include "mppv/quadrature.hpp"
#include "mppv/rng.hpp"
#include "mppv/transform.hpp"

namespace {

using namespace mppv;

TEST(Kernel, ExponentialRateThroughTransform) {
  const auto exp_id = InterarrivalKernel::exponential(identity_transform());
  EXPECT_DOUBLE_EQ(exp_id.rate_of(2.5), 2.5);

  const auto exp_recip = InterarrivalKernel::exponential(reciprocal_transform());
  EXPECT_DOUBLE_EQ(exp_recip.rate_of(4.0), 0.25);

  const auto exp_exp = InterarrivalKernel::exponential(exp_transform());
  EXPECT_NEAR(exp_exp.rate_of(-0.5), std::exp(-0.5), 1e-15);
}

TEST(Kernel, RejectsNonPositiveRate) {
  const auto k = InterarrivalKernel::exponential(identity_transform());
  EXPECT_THROW(k.rate_of(0.0), DomainError);
  EXPECT_THROW(k.rate_of(-1.0), DomainError);
  EXPECT_THROW(k.rate_of(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(Kernel, NullSetSkipsRateEvaluation) {
  auto k = InterarrivalKernel::exponential(identity_transform())
               .with_null_set([](double t) { return t == 3.0; }, "the single point 3");
  EXPECT_TRUE(k.in_null_set(3.0));
  EXPECT_FALSE(k.in_null_set(2.0));
  EXPECT_THROW(k.rate_of(3.0), DomainError);
  EXPECT_DOUBLE_EQ(k.rate_of(2.0), 2.0);
}

TEST(Kernel, ExponentialCdfDensity) {
  const auto k = InterarrivalKernel::exponential(identity_transform());
  EXPECT_NEAR(k.cdf(2.0, 1.0), 1.0 - std::exp(-2.0), 1e-15);
  EXPECT_NEAR(k.density(2.0, 1.0), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_DOUBLE_EQ(k.cdf(2.0, 0.0), 0.0);
  EXPECT_THROW(k.density(2.0, -1.0), DomainError);  // pre: t >= 0
}

TEST(Kernel, ErlangShapeValidation) {
  EXPECT_THROW(InterarrivalKernel::erlang(1, identity_transform()), DomainError);
  EXPECT_THROW(InterarrivalKernel::erlang(0, identity_transform()), DomainError);
  EXPECT_NO_THROW(InterarrivalKernel::erlang(2, identity_transform()));
}

TEST(Kernel, ErlangCdfClosedForm) {
  // Erlang(2, rate 1): F(t) = 1 - (1 + t) e^{-t}; F(1) = 1 - 2/e.
  const auto k = InterarrivalKernel::erlang(2, identity_transform());
  EXPECT_NEAR(k.cdf(1.0, 1.0), 1.0 - 2.0 * std::exp(-1.0), 1e-14);
  // Density f(t) = r^2 t e^{-rt}; at r=1,t=1: e^{-1}.
  EXPECT_NEAR(k.density(1.0, 1.0), std::exp(-1.0), 1e-14);
  EXPECT_DOUBLE_EQ(k.density(1.0, 0.0), 0.0);
}

TEST(Kernel, DensityIntegratesToCdf) {
  for (const auto& k : {InterarrivalKernel::exponential(identity_transform()),
                        InterarrivalKernel::erlang(3, identity_transform())}) {
    const double theta = 1.7;
    QuadratureControl ctl;
    ctl.rel_tol = 1e-12;
    const double mass =
        integrate_adaptive([&](double t) { return k.density(theta, t); }, 0.0, 2.0, ctl).value;
    EXPECT_NEAR(mass, k.cdf(theta, 2.0), 1e-10) << k.describe();
  }
}

TEST(Kernel, SamplerMatchesCdf) {
  // PIT of sampled interarrivals through the kernel's own cdf is uniform.
  for (const auto& k : {InterarrivalKernel::exponential(identity_transform()),
                        InterarrivalKernel::erlang(2, identity_transform())}) {
    SplitStream s(0xabcdULL, 11, StreamPurpose::kArrivals);
    const std::size_t n = 100000;
    std::vector<double> u(n);
    const double theta = 0.8;
    for (auto& v : u) v = k.cdf(theta, k.sample_interarrival(theta, s));
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d = std::max(d, std::max((i + 1.0) / n - u[i], u[i] - static_cast<double>(i) / n));
    }
    EXPECT_LT(d, ks_critical_value(n, 0.01)) << k.describe();
  }
}

TEST(Kernel, ExponentialMemorylessness) {
  // P(W > s + t | W > s) = P(W > t): survival ratio identity, exact in cdf.
  const auto k = InterarrivalKernel::exponential(identity_transform());
  const double theta = 1.3, s = 0.7, t = 1.9;
  const double lhs = (1.0 - k.cdf(theta, s + t)) / (1.0 - k.cdf(theta, s));
  EXPECT_NEAR(lhs, 1.0 - k.cdf(theta, t), 1e-12);
}

TEST(Kernel, ErlangIsNotMemoryless) {
  const auto k = InterarrivalKernel::erlang(2, identity_transform());
  const double theta = 1.0, s = 1.0, t = 1.0;
  const double lhs = (1.0 - k.cdf(theta, s + t)) / (1.0 - k.cdf(theta, s));
  EXPECT_GT(std::abs(lhs - (1.0 - k.cdf(theta, t))), 0.05);
}

TEST(Kernel, DominatingEnvelope) {
  const auto k = InterarrivalKernel::exponential(reciprocal_transform());
  EXPECT_DOUBLE_EQ(k.dominating(4.0), 0.25);
  EXPECT_EQ(k.dominating_name(), "rate");
}

}  // namespace
