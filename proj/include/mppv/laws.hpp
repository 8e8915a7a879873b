#pragma once
// Exact finite-dimensional laws and identity residuals. Three evaluator
// routes: the conditional Poisson product, quadrature of that product against
// a mixing law, and the Gamma-mixing closed form (negative binomial family).
// Probabilities are assembled in log space with log-gamma factorials and a
// single final exponentiation, so deep joint queries do not underflow
// factor by factor.
//
// Residual conventions: every identity is reported as LHS - RHS with the LHS
// as the joint-event probability, so signs are comparable across runs.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mppv/core.hpp"
#include "mppv/errors.hpp"
#include "mppv/mixing.hpp"
#include "mppv/quadrature.hpp"
#include "mppv/special.hpp"

namespace mppv {

struct QuadratureSettings {
  double rel_tol = 1e-10;
  double tail_mass = 1e-14;
  int max_intervals = 4000;

  QuadratureControl control() const {
    return QuadratureControl{rel_tol, 0.0, max_intervals};
  }
};

// log P(joint increments = kappa) for a Poisson process with the given rate.
inline double log_poisson_fdd(double rate, const FddQuery& q) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError("log_poisson_fdd: requires a positive finite rate");
  }
  double log_p = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < q.times.size(); ++j) {
    const double delta = q.times[j] - prev;
    const double mean = rate * delta;
    const auto kappa = static_cast<double>(q.increments[j]);
    log_p += -mean - log_factorial(q.increments[j]);
    if (kappa > 0.0) log_p += kappa * std::log(mean);
    prev = q.times[j];
  }
  return log_p;
}

inline double poisson_fdd(double rate, const FddQuery& q) {
  return std::exp(log_poisson_fdd(rate, q));
}

// Integral of the conditional Poisson product against the mixing law U.
// Atomic U reduces to exact finite sums (Degenerate: plain Poisson).
inline double mpp_fdd_quadrature(const MixingLaw& U, const FddQuery& q,
                                 const QuadratureSettings& settings = {}) {
  if (!U.mass_on_positive()) {
    throw DomainError("mpp_fdd_quadrature: mixing law must put all mass on (0,inf)");
  }
  return expect(
      U, [&](double rate) { return poisson_fdd(rate, q); }, settings.control(),
      settings.tail_mass);
}

// Closed form of the Gamma-mixing integral:
//   (prod_j Delta_j^kappa_j / kappa_j!) * Gamma(a+n)/Gamma(a) * b^a/(b+t_m)^(a+n)
// with n the total count. Serves as the independent oracle for the
// quadrature route.
inline double polya_fdd_closed(double alpha, double beta, const FddQuery& q) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw DomainError("polya_fdd_closed: requires alpha > 0 and beta > 0");
  }
  const double t_m = q.times.back();
  const auto n = static_cast<double>(q.total());
  double log_p = log_gamma(alpha + n) - log_gamma(alpha) + alpha * std::log(beta) -
                 (alpha + n) * std::log(beta + t_m);
  double prev = 0.0;
  for (std::size_t j = 0; j < q.times.size(); ++j) {
    const double delta = q.times[j] - prev;
    const auto kappa = static_cast<double>(q.increments[j]);
    log_p -= log_factorial(q.increments[j]);
    if (kappa > 0.0) log_p += kappa * std::log(delta);
    prev = q.times[j];
  }
  return std::exp(log_p);
}

// One evaluator value type covering the three exact routes, so batteries and
// configs can carry "which exact law" as data.
class FddEvaluator {
 public:
  static FddEvaluator poisson(double rate) {
    if (!(rate > 0.0)) throw DomainError("FddEvaluator: Poisson rate must be positive");
    return FddEvaluator(Poisson{rate});
  }
  static FddEvaluator polya(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
      throw DomainError("FddEvaluator: Polya parameters must be positive");
    }
    return FddEvaluator(Polya{alpha, beta});
  }
  static FddEvaluator quadrature(MixingLaw law, QuadratureSettings settings = {}) {
    if (!law.mass_on_positive()) {
      throw DomainError("FddEvaluator: mixing law must put all mass on (0,inf)");
    }
    return FddEvaluator(Quad{std::move(law), settings});
  }

  double operator()(const FddQuery& q) const {
    if (const auto* p = std::get_if<Poisson>(&v_)) return poisson_fdd(p->rate, q);
    if (const auto* p = std::get_if<Polya>(&v_)) return polya_fdd_closed(p->alpha, p->beta, q);
    const auto& quad = std::get<Quad>(v_);
    return mpp_fdd_quadrature(quad.law, q, quad.settings);
  }

  std::string describe() const {
    if (const auto* p = std::get_if<Poisson>(&v_)) {
      return "poisson(rate=" + std::to_string(p->rate) + ")";
    }
    if (const auto* p = std::get_if<Polya>(&v_)) {
      return "polya(alpha=" + std::to_string(p->alpha) + ", beta=" +
             std::to_string(p->beta) + ")";
    }
    return "quadrature(" + std::get<Quad>(v_).law.describe() + ")";
  }

 private:
  struct Poisson {
    double rate;
  };
  struct Polya {
    double alpha, beta;
  };
  struct Quad {
    MixingLaw law;
    QuadratureSettings settings;
  };
  using Variant = std::variant<Poisson, Polya, Quad>;
  explicit FddEvaluator(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

template <class F>
concept FddEvaluatorLike = requires(const F& f, const FddQuery& q) {
  { f(q) } -> std::convertible_to<double>;
};

namespace detail {

inline void check_cumulative(std::span<const double> times,
                             std::span<const std::int64_t> cumulative) {
  if (times.size() != cumulative.size() || times.empty()) {
    throw DomainError("identity residual: times and counts must be nonempty, equal length");
  }
}

}  // namespace detail

// Multinomial identity: the joint law of increments given the final count is
// multinomial with cell probabilities Delta_j / t_m. Residual of
//   P(all increments) - n!/(prod kappa_j!) prod (Delta_j/t_m)^kappa_j P(N_{t_m}=n).
template <FddEvaluatorLike F>
double multinomial_residual(const F& f, std::span<const double> times,
                            std::span<const std::int64_t> cumulative) {
  detail::check_cumulative(times, cumulative);
  const FddQuery joint = FddQuery::from_cumulative(
      std::vector<double>(times.begin(), times.end()),
      std::vector<std::int64_t>(cumulative.begin(), cumulative.end()));
  const double t_m = joint.times.back();
  const std::int64_t n = cumulative.back();

  double log_coeff = log_factorial(n);
  double prev = 0.0;
  for (std::size_t j = 0; j < joint.times.size(); ++j) {
    const double delta = joint.times[j] - prev;
    const auto kappa = static_cast<double>(joint.increments[j]);
    log_coeff -= log_factorial(joint.increments[j]);
    if (kappa > 0.0) log_coeff += kappa * std::log(delta / t_m);
    prev = joint.times[j];
  }

  const FddQuery last({t_m}, {n});
  return f(joint) - std::exp(log_coeff) * f(last);
}

// Binomial splitting: given N_t = n, the count at s < t is Binomial(n, s/t).
// Residual of P(N_s=k, N_t-N_s=n-k) - C(n,k)(s/t)^k(1-s/t)^(n-k) P(N_t=n).
template <FddEvaluatorLike F>
double binomial_splitting_residual(const F& f, double s, double t, std::int64_t k,
                                   std::int64_t n) {
  if (!(0.0 < s && s < t)) throw DomainError("binomial_splitting_residual: requires 0 < s < t");
  if (k < 0 || n < k) throw DomainError("binomial_splitting_residual: requires 0 <= k <= n");

  const FddQuery joint({s, t}, {k, n - k});
  const FddQuery last({t}, {n});
  double log_coeff = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
  if (k > 0) log_coeff += static_cast<double>(k) * std::log(s / t);
  if (n - k > 0) log_coeff += static_cast<double>(n - k) * std::log1p(-s / t);
  return f(joint) - std::exp(log_coeff) * f(last);
}

// Markov factorization through the latest observed count:
//   P(N_{t_1..t_m} path) P(N_{t_m}, N_{t_{m+1}}) - P(N_{t_1..t_{m+1}} path) P(N_{t_m}).
template <FddEvaluatorLike F>
double markov_factorization_residual(const F& f, std::span<const double> times,
                                     std::span<const std::int64_t> cumulative) {
  detail::check_cumulative(times, cumulative);
  if (times.size() < 2) {
    throw DomainError("markov_factorization_residual: needs at least two time points");
  }
  const std::size_t m = times.size() - 1;

  const auto sub = [&](std::size_t begin, std::size_t end) {
    return FddQuery::from_cumulative(
        std::vector<double>(times.begin() + begin, times.begin() + end),
        std::vector<std::int64_t>(cumulative.begin() + begin, cumulative.begin() + end));
  };
  // Head prefix probabilities use cumulative counts from time zero; the pair
  // (t_m, t_{m+1}) block reuses the same absolute counts, making it the joint
  // event {N_{t_m}=n_m, N_{t_{m+1}}=n_{m+1}}.
  const double head = f(sub(0, m));             // P(first m points)
  const double full = f(sub(0, m + 1));         // P(all m+1 points)
  const FddQuery pair_q = FddQuery::from_cumulative(
      {times[m - 1], times[m]},
      {cumulative[m - 1], cumulative[m]});
  const double pair = f(pair_q);
  const FddQuery single_q({times[m - 1]}, {cumulative[m - 1]});
  const double single = f(single_q);
  return head * pair - full * single;
}

// Joint interarrival upper-orthant probability of the product construction:
//   integral of prod_k F_{alpha(y)}(w_k) against the mixing measure, with
//   exponential conditional laws.
inline double huang_product_rhs(const MixingLaw& U, const Transform& alpha,
                                std::span<const double> w,
                                const QuadratureSettings& settings = {}) {
  if (w.empty()) throw DomainError("huang_product_rhs: needs at least one w_k");
  for (double wk : w) {
    if (!(wk > 0.0) || !std::isfinite(wk)) {
      throw DomainError("huang_product_rhs: w_k must be positive and finite");
    }
  }
  return expect(
      U,
      [&](double y) {
        const double rate = alpha(y);
        if (!(rate > 0.0)) {
          throw DomainError("huang_product_rhs: transform gave a non-positive rate");
        }
        double prod = 1.0;
        for (double wk : w) prod *= -std::expm1(-rate * wk);
        return prod;
      },
      settings.control(), settings.tail_mass);
}

// Smallest count level K with a certified bound P(N_Delta > K) < eps, via
// min over c of: mixing tail above theta* = (K+1)/(c Delta) plus the Poisson
// upper tail at mean (K+1)/c, bounded by exp(-lambda)(e lambda/(K+1))^(K+1).
inline std::int64_t truncation_level(const MixingLaw& U, double delta, double eps) {
  if (!(delta > 0.0)) throw DomainError("truncation_level: requires delta > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("truncation_level: requires eps in (0,1)");

  const auto bound_for = [&](std::int64_t K) {
    const auto k1 = static_cast<double>(K + 1);
    double best = 1.0;
    for (double c : {1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
      const double theta_star = k1 / (c * delta);
      const double mixing_tail = 1.0 - U.cdf(theta_star);
      const double poisson_tail = std::exp(k1 * (1.0 - 1.0 / c - std::log(c)));
      best = std::min(best, mixing_tail + poisson_tail);
    }
    return best;
  };

  std::int64_t hi = 8;
  while (bound_for(hi) >= eps) {
    hi *= 2;
    if (hi > (std::int64_t{1} << 24)) {
      throw NumericError("truncation_level: no certified level below 2^24");
    }
  }
  std::int64_t lo = hi / 2;
  while (lo + 1 < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (bound_for(mid) < eps ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace mppv
