#pragma once
// Adaptive Gauss-Kronrod (G7,K15) integration on a finite interval. The worst
// panel by error estimate is bisected until the total estimate meets the
// tolerance or the panel budget runs out, in which case a NumericError carrying
// the partial value, the error estimate, and the panel count is thrown.

#include <cmath>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "mppv/errors.hpp"

namespace mppv {

struct QuadratureControl {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// K15 nodes on [0,1] side (symmetric), K15 weights, and embedded G7 weights.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15_panel(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(center - half * kGK15Nodes[i]);
    fv[14 - i] = f(center + half * kGK15Nodes[i]);
  }
  fv[7] = f(center);
  for (double v : fv) {
    if (!std::isfinite(v)) {
      throw NumericError("integrate_adaptive: integrand returned a non-finite value");
    }
  }

  double resk = kK15Weights[7] * fv[7];
  double resabs = std::fabs(resk);
  double resg = kG7Weights[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += kK15Weights[i] * (fv[i] + fv[14 - i]);
    resabs += kK15Weights[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
  }
  for (int i = 0; i < 3; ++i) {
    resg += kG7Weights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  }

  const double mean = 0.5 * resk;
  double resasc = kK15Weights[7] * std::fabs(fv[7] - mean);
  for (int i = 0; i < 7; ++i) {
    resasc += kK15Weights[i] * (std::fabs(fv[i] - mean) + std::fabs(fv[14 - i] - mean));
  }

  double err = std::fabs((resk - resg) * half);
  resasc *= half;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }

  return Panel{a, b, resk * half, err};
}

}  // namespace detail

template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    const QuadratureControl& control = {}) {
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw DomainError("integrate_adaptive: endpoints must be finite");
  }
  if (a >= b) throw DomainError("integrate_adaptive: requires a < b");

  std::priority_queue<detail::Panel> panels;
  detail::Panel first = detail::gk15_panel(f, a, b);
  double total = first.value;
  double total_err = first.error;
  int count = 1;
  panels.push(first);

  auto tolerance = [&]() { return std::max(control.abs_tol, control.rel_tol * std::fabs(total)); };

  while (total_err > tolerance()) {
    if (count + 1 > control.max_intervals) {
      throw NumericError(
          "integrate_adaptive: panel budget exhausted before reaching tolerance",
          total, total_err, count);
    }
    detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw NumericError("integrate_adaptive: interval too small to bisect further",
                         total, total_err, count);
    }
    detail::Panel left = detail::gk15_panel(f, worst.a, mid);
    detail::Panel right = detail::gk15_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    ++count;
    panels.push(left);
    panels.push(right);
  }

  return QuadratureResult{total, total_err, count};
}

}  // namespace mppv
