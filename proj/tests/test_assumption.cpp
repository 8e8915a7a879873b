#include <gtest/gtest.h>

#include <cmath>

#include "mppv/assumption.hpp"
#include "mppv/errors.hpp"
#include "mppv/kernels.hpp"
#include "mppv/mixing.hpp"
#include "mppv/transform.hpp"

namespace {

using namespace mppv;

// For an exponential kernel the density limit at 0 is the rate itself, so
// the numerical limit must reproduce the transform.
TEST(DensityLimit, ExponentialIdentity) {
  const auto k = InterarrivalKernel::exponential(identity_transform());
  EXPECT_NEAR(p_h_numeric(k, 0.5), 0.5, 1e-6);
  EXPECT_NEAR(p_h_numeric(k, 3.0), 3.0, 1e-6);
}

TEST(DensityLimit, ExponentialReciprocal) {
  const auto k = InterarrivalKernel::exponential(reciprocal_transform());
  EXPECT_NEAR(p_h_numeric(k, 4.0), 0.25, 1e-6);
}

TEST(DensityLimit, ExponentialExp) {
  const auto k = InterarrivalKernel::exponential(exp_transform());
  EXPECT_NEAR(p_h_numeric(k, -0.7), std::exp(-0.7), 1e-6);
}

// Erlang densities vanish at 0, so the limit collapses onto the positivity
// floor and must be reported as a violation, not as a tiny positive number.
TEST(DensityLimit, ErlangViolatesPositivity) {
  const auto k = InterarrivalKernel::erlang(2, identity_transform());
  EXPECT_THROW(p_h_numeric(k, 1.0), AssumptionViolation);
}

TEST(DensityLimit, NullSetThetaRejected) {
  // Evaluating the limit at a null-set theta is a precondition violation.
  const auto k = InterarrivalKernel::exponential(identity_transform())
                     .with_null_set([](double t) { return t == 2.0; }, "point 2");
  EXPECT_THROW(p_h_numeric(k, 2.0), DomainError);
}

TEST(CheckAssumption, PassesForExponentialFamilies) {
  const auto report = check_assumption(InterarrivalKernel::exponential(reciprocal_transform()),
                                       MixingLaw::inverse_gamma(2.0, 2.0), 32);
  EXPECT_TRUE(report.positivity_ok);
  EXPECT_TRUE(report.injectivity_ok);
  EXPECT_TRUE(report.domination_ok);
  EXPECT_TRUE(report.all_ok());
  EXPECT_TRUE(report.l1_finite);
  // E[1/Theta] under InvGamma(2,2) equals the Gamma(2,2) mean, 1.
  EXPECT_NEAR(report.l1_integral, 1.0, 1e-6);
  EXPECT_EQ(report.grid.size(), 32u);
}

TEST(CheckAssumption, FlagsErlangWithoutThrowing) {
  AssumptionReport report;
  EXPECT_NO_THROW(report = check_assumption(InterarrivalKernel::erlang(2, identity_transform()),
                                            MixingLaw::gamma(2.0, 2.0), 16));
  EXPECT_FALSE(report.positivity_ok);
  EXPECT_FALSE(report.all_ok());
  for (const auto& point : report.grid) {
    EXPECT_FALSE(point.ok);
    EXPECT_TRUE(std::isnan(point.p_value));
    EXPECT_FALSE(point.failure.empty());
  }
}

TEST(CheckAssumption, ConstantRateFailsInjectivity) {
  // A transform that collapses every parameter to the same rate: positivity
  // holds pointwise but distinct thetas are indistinguishable.
  Transform collapse = identity_transform();
  collapse.name = "collapse";
  static auto flat = [](double) { return 1.0; };
  collapse.forward = flat;
  collapse.inverse = nullptr;
  const auto k = InterarrivalKernel::exponential(collapse);
  const auto report = check_assumption(k, MixingLaw::gamma(2.0, 2.0), 8);
  EXPECT_TRUE(report.positivity_ok);
  EXPECT_FALSE(report.injectivity_ok);
  EXPECT_FALSE(report.all_ok());
}

TEST(CheckAssumption, AtomicGridCollapsesToDistinctAtoms) {
  const auto k = InterarrivalKernel::exponential(identity_transform());
  const auto report = check_assumption(k, MixingLaw::discrete({{1.0, 0.5}, {2.0, 0.5}}), 64);
  EXPECT_EQ(report.grid.size(), 2u);
  EXPECT_TRUE(report.all_ok());
}

TEST(CheckAssumption, NullSetAtomsAreSkippedAndCounted) {
  const auto k = InterarrivalKernel::exponential(identity_transform())
                     .with_null_set([](double t) { return t == 2.0; }, "point 2");
  const auto report = check_assumption(k, MixingLaw::discrete({{1.0, 0.5}, {2.0, 0.5}}), 64);
  EXPECT_EQ(report.skipped_null_set, 1u);
  EXPECT_EQ(report.grid.size(), 1u);
  EXPECT_TRUE(report.all_ok());
}

TEST(CheckAssumption, DegenerateGridIsSinglePoint) {
  const auto k = InterarrivalKernel::exponential(identity_transform());
  const auto report = check_assumption(k, MixingLaw::degenerate(1.5), 64);
  EXPECT_EQ(report.grid.size(), 1u);
  EXPECT_NEAR(report.grid[0].p_value, 1.5, 1e-6);
  EXPECT_TRUE(report.all_ok());
}

}  // namespace
