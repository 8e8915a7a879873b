#pragma once
// Sample-level test statistics: one-sample Kolmogorov-Smirnov against U(0,1)
// or an arbitrary cdf, lag-1 serial correlation as a normal z-score, and a
// two-sample chi-square homogeneity test on integer counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mppv/errors.hpp"
#include "mppv/special.hpp"

namespace mppv {

// D_n of an already sorted sample of values in [0,1] against the uniform cdf.
inline double ks_statistic_sorted_uniform(std::span<const double> sorted) {
  if (sorted.empty()) throw DomainError("ks_statistic: empty sample");
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = sorted[i];
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("ks_statistic: value outside [0,1]");
    d = std::max(d, std::max((i + 1.0) / n - u, u - static_cast<double>(i) / n));
  }
  return d;
}

template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  for (double& x : sample) x = cdf(x);
  if (!std::is_sorted(sample.begin(), sample.end())) {
    throw DomainError("ks_statistic: cdf is not monotone on the sample");
  }
  return ks_statistic_sorted_uniform(sample);
}

struct SerialCorrelation {
  double r = 0.0;       // lag-1 Pearson correlation over the supplied pairs
  double z = 0.0;       // r * sqrt(#pairs), asymptotically standard normal
  double p_value = 1.0; // two-sided
  std::size_t pairs = 0;
};

// Correlation across explicit (x, y) pairs; callers form within-path lag
// pairs so that correlation is never measured across path boundaries.
inline SerialCorrelation serial_correlation(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw DomainError("serial_correlation: needs at least 3 pairs");
  const auto n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pairs) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw DomainError("serial_correlation: degenerate sample");
  }
  SerialCorrelation out;
  out.pairs = pairs.size();
  out.r = sxy / std::sqrt(sxx * syy);
  out.z = out.r * std::sqrt(n);
  out.p_value = 2.0 * normal_sf(std::fabs(out.z));
  return out;
}

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Homogeneity of two count histograms. Cells are pooled upward until each
// pooled cell has a combined expectation of at least 5.
inline ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                             std::span<const std::int64_t> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("chi_square_two_sample: histograms must be nonempty, equal length");
  }
  double na = 0, nb = 0;
  for (std::int64_t v : a) na += static_cast<double>(v);
  for (std::int64_t v : b) nb += static_cast<double>(v);
  if (!(na > 0) || !(nb > 0)) throw DomainError("chi_square_two_sample: empty sample");

  // Pool adjacent cells so every pooled cell has total count >= 5.
  std::vector<std::pair<double, double>> cells;
  double ca = 0, cb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += static_cast<double>(a[i]);
    cb += static_cast<double>(b[i]);
    if (ca + cb >= 5.0) {
      cells.emplace_back(ca, cb);
      ca = cb = 0;
    }
  }
  if (ca + cb > 0) {
    if (cells.empty()) {
      cells.emplace_back(ca, cb);
    } else {
      cells.back().first += ca;
      cells.back().second += cb;
    }
  }
  if (cells.size() < 2) throw DomainError("chi_square_two_sample: fewer than 2 usable cells");

  double stat = 0.0;
  for (const auto& [xa, xb] : cells) {
    const double tot = xa + xb;
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    stat += (xa - ea) * (xa - ea) / ea + (xb - eb) * (xb - eb) / eb;
  }
  ChiSquareResult out;
  out.statistic = stat;
  out.df = static_cast<double>(cells.size() - 1);
  out.p_value = chi_square_sf(out.df, stat);
  return out;
}

}  // namespace mppv
