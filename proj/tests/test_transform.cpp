#include <gtest/gtest.h>

#include <cmath>

#include "mppv/errors.hpp"
#include "mppv/transform.hpp"

namespace {

using namespace mppv;

TEST(Transform, IdentityRoundTrip) {
  const Transform id = identity_transform();
  EXPECT_EQ(id.name, "identity");
  EXPECT_DOUBLE_EQ(id.forward(3.5), 3.5);
  EXPECT_DOUBLE_EQ(id.apply_inverse(3.5), 3.5);
  EXPECT_DOUBLE_EQ(id.inverse_derivative(3.5), 1.0);
  EXPECT_EQ(id.monotonicity, 1);
  EXPECT_TRUE(id.domain_covers(-2.0, 7.0));
}

TEST(Transform, ReciprocalRoundTripAndMonotonicity) {
  const Transform r = reciprocal_transform();
  EXPECT_DOUBLE_EQ(r.forward(4.0), 0.25);
  EXPECT_DOUBLE_EQ(r.apply_inverse(0.25), 4.0);
  EXPECT_EQ(r.monotonicity, -1);
  // (f^{-1})'(y) = -1/y^2: the registered derivative keeps its sign.
  EXPECT_NEAR(r.inverse_derivative(0.5), -4.0, 1e-12);
  EXPECT_TRUE(r.domain_covers(0.5, 10.0));
}

TEST(Transform, ReciprocalDomainExcludesZero) {
  const Transform r = reciprocal_transform();
  EXPECT_FALSE(r.domain_covers(-1.0, 1.0));
  EXPECT_TRUE(r.domain_covers(1e-12, 5.0));
  EXPECT_TRUE(r.domain_covers(-5.0, -1e-12));
}

TEST(Transform, ExpRoundTrip) {
  const Transform e = exp_transform();
  EXPECT_DOUBLE_EQ(e.forward(0.0), 1.0);
  EXPECT_NEAR(e.apply_inverse(std::exp(2.0)), 2.0, 1e-12);
  EXPECT_NEAR(e.inverse_derivative(2.0), 0.5, 1e-12);
  EXPECT_EQ(e.monotonicity, 1);
  EXPECT_TRUE(e.domain_covers(-100.0, 100.0));
}

TEST(Transform, LookupByName) {
  EXPECT_EQ(transform_by_name("identity").name, "identity");
  EXPECT_EQ(transform_by_name("reciprocal").name, "reciprocal");
  EXPECT_EQ(transform_by_name("exp").name, "exp");
  EXPECT_THROW(transform_by_name("cube"), DomainError);
}

TEST(Transform, MissingInverseThrows) {
  Transform t = identity_transform();
  t.inverse = nullptr;
  EXPECT_THROW(t.apply_inverse(1.0), UnsupportedOperation);
}

}  // namespace
