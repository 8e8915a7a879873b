#pragma once
// Interarrival kernels: the conditional law of a waiting time given the
// mixing parameter. The kernel owns the rate transform, so callers always
// pass the raw parameter theta; the conditional rate is transform(theta).
// Exponential is the mixed-Poisson case; Erlang is the negative control.
//
// Conventions: Exp(rate) has mean 1/rate and density rate*exp(-rate*t).
// Erlang(shape k, rate) has mean k/rate; its sampler sums k exponential
// inversions so every sample consumes a fixed number of draws.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "mppv/errors.hpp"
#include "mppv/rng.hpp"
#include "mppv/special.hpp"
#include "mppv/transform.hpp"

namespace mppv {

enum class KernelFamily { kExponential, kErlang };

class InterarrivalKernel {
 public:
  static InterarrivalKernel exponential(const Transform& transform) {
    return InterarrivalKernel(KernelFamily::kExponential, 1, transform);
  }

  static InterarrivalKernel erlang(int shape, const Transform& transform) {
    if (shape < 2) throw DomainError("erlang kernel: requires shape >= 2");
    return InterarrivalKernel(KernelFamily::kErlang, shape, transform);
  }

  // Same kernel with a declared null set of excluded parameters.
  InterarrivalKernel with_null_set(std::function<bool(double)> member,
                                   std::string description) const {
    InterarrivalKernel k = *this;
    k.null_member_ = std::move(member);
    k.null_description_ = std::move(description);
    return k;
  }

  KernelFamily family() const { return family_; }
  int shape() const { return shape_; }
  const Transform& transform() const { return transform_; }
  std::string_view null_set_description() const { return null_description_; }

  bool in_null_set(double theta) const { return null_member_ && null_member_(theta); }

  // Conditional rate h(theta). Rate 0 (or worse) is rejected here, which is
  // what keeps degenerate plans from ever building a flat path law.
  double rate_of(double theta) const {
    check_null_set(theta);
    const double rate = transform_(theta);
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw DomainError("kernel: transform '" + std::string(transform_.name) +
                        "' gave a non-positive or non-finite rate at theta = " +
                        std::to_string(theta));
    }
    return rate;
  }

  double cdf(double theta, double t) const {
    if (!(t >= 0.0)) throw DomainError("kernel cdf: requires t >= 0");
    const double rate = rate_of(theta);
    if (family_ == KernelFamily::kExponential) return -std::expm1(-rate * t);
    return regularized_gamma_p(static_cast<double>(shape_), rate * t);
  }

  double density(double theta, double t) const {
    if (!(t >= 0.0)) throw DomainError("kernel density: requires t >= 0");
    const double rate = rate_of(theta);
    if (family_ == KernelFamily::kExponential) return rate * std::exp(-rate * t);
    if (t == 0.0) return 0.0;  // shape >= 2
    const double k = static_cast<double>(shape_);
    return std::exp(k * std::log(rate) + (k - 1.0) * std::log(t) - rate * t - log_gamma(k));
  }

  double sample_interarrival(double theta, SplitStream& stream) const {
    const double rate = rate_of(theta);
    if (family_ == KernelFamily::kExponential) return stream.exponential(rate);
    double sum = 0.0;
    for (int i = 0; i < shape_; ++i) sum += stream.exponential(rate);
    return sum;
  }

  // Declared dominating function for the conditional densities: the constant
  // C(theta) = h(theta) bounds f_{h(theta)} for both shipped families (the
  // exponential density starts at the rate and decreases; the Erlang-k mode
  // is below rate/e). It is a declaration, not an inference.
  double dominating(double theta) const { return rate_of(theta); }
  std::string_view dominating_name() const { return "rate"; }

  std::string describe() const {
    const std::string h = std::string(transform_.name);
    if (family_ == KernelFamily::kExponential) return "exponential(h=" + h + ")";
    return "erlang(shape=" + std::to_string(shape_) + ", h=" + h + ")";
  }

 private:
  InterarrivalKernel(KernelFamily family, int shape, const Transform& transform)
      : family_(family), shape_(shape), transform_(transform) {}

  void check_null_set(double theta) const {
    if (in_null_set(theta)) {
      throw DomainError("kernel: theta = " + std::to_string(theta) +
                        " lies in the declared null set" +
                        (null_description_.empty() ? "" : " (" + null_description_ + ")"));
    }
  }

  KernelFamily family_;
  int shape_;
  Transform transform_;
  std::function<bool(double)> null_member_;
  std::string null_description_;
};

}  // namespace mppv
