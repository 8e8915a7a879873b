#include "mppv/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace mppv {
namespace {

TEST(Quadrature, PolynomialIsExactOnOnePanel) {
  // K15 integrates degree <= 22 exactly.
  auto f = [](double x) { return 5.0 * x * x * x * x; };
  const QuadratureResult r = integrate_adaptive(f, 0.0, 2.0);
  EXPECT_NEAR(r.value, 32.0, 1e-12);
  EXPECT_EQ(r.intervals, 1);
}

TEST(Quadrature, GaussianMass) {
  auto f = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  const QuadratureResult r = integrate_adaptive(f, -8.0, 8.0, {.rel_tol = 1e-12});
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(Quadrature, SharpPeakNeedsRefinement) {
  // Narrow Cauchy bump, analytic value 2*atan(2000)/1000 approximately.
  auto f = [](double x) { return 1.0 / (1e-6 + (x - 1.0) * (x - 1.0)); };
  const double exact = (std::atan(1e3) + std::atan(1e3)) * 1e3;
  const QuadratureResult r = integrate_adaptive(f, 0.0, 2.0, {.rel_tol = 1e-10});
  EXPECT_NEAR(r.value / exact, 1.0, 1e-10);
  EXPECT_GT(r.intervals, 4);
}

TEST(Quadrature, BudgetExhaustionCarriesDiagnostics) {
  auto f = [](double x) { return 1.0 / std::sqrt(std::fabs(x) + 1e-300); };
  try {
    integrate_adaptive(f, 0.0, 1.0, {.rel_tol = 1e-14, .max_intervals = 8});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_GT(e.intervals, 0);
    EXPECT_LE(e.intervals, 8);
    EXPECT_GT(e.error_estimate, 0.0);
    EXPECT_GT(e.value, 0.0);
  }
}

TEST(Quadrature, RejectsBadIntervalsAndNonFiniteValues) {
  auto f = [](double x) { return x; };
  EXPECT_THROW(integrate_adaptive(f, 1.0, 1.0), DomainError);
  EXPECT_THROW(integrate_adaptive(f, 2.0, 1.0), DomainError);
  auto h = [](double x) { return 1.0 / (x - 0.5) / 0.0; };
  EXPECT_THROW(integrate_adaptive(h, 0.0, 1.0), NumericError);
}

TEST(Quadrature, AdditiveOverSplitPoints) {
  auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  const double whole = integrate_adaptive(f, 0.0, 5.0, {.rel_tol = 1e-12}).value;
  const double left = integrate_adaptive(f, 0.0, 1.7, {.rel_tol = 1e-12}).value;
  const double right = integrate_adaptive(f, 1.7, 5.0, {.rel_tol = 1e-12}).value;
  EXPECT_NEAR(whole, left + right, 1e-12);
}

}  // namespace
}  // namespace mppv
