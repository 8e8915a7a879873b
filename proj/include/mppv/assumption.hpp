#pragma once
// Regularity checks on the kernel's conditional law: the density limit
// p_h(theta) = lim_{t->0} F'_{h(theta)}(t) evaluated numerically, and the
// scenario-level report covering positivity, injectivity, domination, and
// integrability of the dominating function.
//
// The limit is taken by Richardson extrapolation of the one-sided difference
// quotient F(t)/t on the dyadic steps t = 2^-k, k = 10..20. The quotient has
// a full Taylor expansion in t for the shipped kernels, so each extrapolation
// sweep removes one order; convergence is declared when successive diagonal
// estimates agree within 1e-8, and the same 1e-8 acts as the positivity
// floor (an extrapolated limit below it is indistinguishable from zero).

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mppv/errors.hpp"
#include "mppv/kernels.hpp"
#include "mppv/mixing.hpp"
#include "mppv/quadrature.hpp"

namespace mppv {

inline constexpr double kDensityLimitTol = 1e-8;

inline double p_h_numeric(const InterarrivalKernel& kernel, double theta) {
  if (kernel.in_null_set(theta)) {
    throw DomainError("p_h_numeric: theta = " + std::to_string(theta) +
                      " lies in the kernel's declared null set");
  }
  constexpr int kMin = 10, kMax = 20;
  constexpr int n = kMax - kMin + 1;
  double row[n];
  for (int i = 0; i < n; ++i) {
    const double t = std::ldexp(1.0, -(kMin + i));
    row[i] = kernel.cdf(theta, t) / t;
  }

  double previous = row[0];
  double pow2j = 1.0;
  for (int j = 1; j < n; ++j) {
    pow2j *= 2.0;
    for (int i = 0; i + j < n; ++i) {
      row[i] = (pow2j * row[i + 1] - row[i]) / (pow2j - 1.0);
    }
    const double estimate = row[0];
    if (std::fabs(estimate - previous) < kDensityLimitTol) {
      if (!(estimate > kDensityLimitTol)) {
        throw AssumptionViolation(
            "p_h_numeric: density limit at theta = " + std::to_string(theta) +
            " is not positive (extrapolated " + std::to_string(estimate) + ")");
      }
      return estimate;
    }
    previous = estimate;
  }
  throw AssumptionViolation("p_h_numeric: extrapolation did not settle within 1e-8 at theta = " +
                            std::to_string(theta));
}

struct AssumptionGridPoint {
  double theta = 0.0;
  double p_value = 0.0;   // NaN when the limit failed
  bool ok = false;
  std::string failure;    // empty when ok
};

struct AssumptionReport {
  std::vector<AssumptionGridPoint> grid;
  bool positivity_ok = false;
  bool injectivity_ok = false;
  bool domination_ok = false;
  double l1_integral = 0.0;       // E[C(h(Theta))]; reported without a threshold
  bool l1_finite = false;
  std::size_t skipped_null_set = 0;

  bool all_ok() const { return positivity_ok && injectivity_ok && domination_ok; }
};

namespace detail {

// Estimated sup_t of the conditional density on a log-spaced grid scaled by
// the conditional rate; covers the mode of every shipped family.
inline double estimate_density_sup(const InterarrivalKernel& kernel, double theta) {
  const double rate = kernel.rate_of(theta);
  double sup = 0.0;
  const double lo = std::log(1e-7), hi = std::log(32.0);
  constexpr int kPoints = 160;
  for (int i = 0; i <= kPoints; ++i) {
    const double t = std::exp(lo + (hi - lo) * i / kPoints) / rate;
    sup = std::max(sup, kernel.density(theta, t));
  }
  return sup;
}

}  // namespace detail

// Grid check of the regularity conditions against a base law. Violations are
// report entries, never exceptions. grid_size quantile points at levels
// (i + 1/2)/grid_size; duplicate thetas (atomic laws) are collapsed before
// the injectivity comparison.
inline AssumptionReport check_assumption(const InterarrivalKernel& kernel,
                                         const MixingLaw& law, int grid_size = 64) {
  if (grid_size < 2) throw DomainError("check_assumption: requires grid_size >= 2");

  AssumptionReport report;
  report.positivity_ok = true;
  report.domination_ok = true;

  std::vector<double> thetas;
  thetas.reserve(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) {
    const double p = (i + 0.5) / grid_size;
    const double theta = law.quantile(p);
    if (!thetas.empty() && theta == thetas.back()) continue;  // atomic law plateau
    thetas.push_back(theta);
  }

  for (double theta : thetas) {
    if (kernel.in_null_set(theta)) {
      ++report.skipped_null_set;
      continue;
    }
    AssumptionGridPoint point;
    point.theta = theta;
    try {
      point.p_value = p_h_numeric(kernel, theta);
      point.ok = true;
    } catch (const AssumptionViolation& e) {
      point.p_value = std::numeric_limits<double>::quiet_NaN();
      point.failure = e.what();
      report.positivity_ok = false;
    }
    if (point.ok) {
      const double sup = detail::estimate_density_sup(kernel, theta);
      const double bound = kernel.dominating(theta);
      if (sup > bound * (1.0 + 1e-9)) {
        point.ok = false;
        point.failure = "density exceeds the declared dominating function";
        report.domination_ok = false;
      }
    }
    report.grid.push_back(point);
  }

  // Injectivity on the grid: distinct parameters must give distinct limits,
  // resolved well above the extrapolation tolerance.
  report.injectivity_ok = true;
  std::vector<double> values;
  for (const auto& point : report.grid) {
    if (std::isnan(point.p_value)) continue;
    values.push_back(point.p_value);
  }
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double gap = values[i] - values[i - 1];
    if (gap <= kDensityLimitTol * std::max(1.0, std::fabs(values[i]))) {
      report.injectivity_ok = false;
      break;
    }
  }
  if (!report.positivity_ok) report.injectivity_ok = false;

  // Integrability of the dominating function under the base law. The value
  // is informational: finiteness is checked, no pass threshold is applied.
  try {
    report.l1_integral =
        expect(law, [&](double theta) { return kernel.dominating(theta); },
               QuadratureControl{.rel_tol = 1e-9, .max_intervals = 8000});
    report.l1_finite = std::isfinite(report.l1_integral);
  } catch (const Error&) {
    report.l1_integral = std::numeric_limits<double>::infinity();
    report.l1_finite = false;
  }

  return report;
}

}  // namespace mppv
