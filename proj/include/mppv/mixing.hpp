#pragma once
// Mixing laws: the distribution of the mixing parameter and of its rate-scale
// pushforward. One closed variant set, immutable values, analytic cdf and
// quantile per variant so that quadrature truncation and tail bounds never
// rely on sampling. The Normal variant exists only as a base law for
// pushforwards; it has mass on the negative axis and is rejected wherever a
// mixing distribution proper is required. Pushforwards of atomic laws are
// collapsed at construction, so a stored PushforwardLaw always wraps a
// continuous base.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mppv/errors.hpp"
#include "mppv/quadrature.hpp"
#include "mppv/rng.hpp"
#include "mppv/special.hpp"
#include "mppv/transform.hpp"

namespace mppv {

class MixingLaw;

struct DegenerateLaw {
  double value;
};

struct GammaLaw {
  double shape, rate;
};

struct InverseGammaLaw {
  double shape, rate;  // density rate^shape / Gamma(shape) * x^(-shape-1) e^(-rate/x)
};

struct LogNormalLaw {
  double mu, sigma2;
};

struct NormalLaw {
  double mu, sigma2;
};

struct DiscreteLaw {
  std::vector<std::pair<double, double>> atoms;  // (location, weight), sorted
};

struct PushforwardLaw {
  std::shared_ptr<const MixingLaw> base;
  Transform map;
};

// Closure of the support as an interval.
struct Support {
  double lo, hi;
};

class MixingLaw {
 public:
  using Variant = std::variant<DegenerateLaw, GammaLaw, InverseGammaLaw, LogNormalLaw,
                               NormalLaw, DiscreteLaw, PushforwardLaw>;

  static MixingLaw degenerate(double value) {
    require(value > 0.0 && std::isfinite(value), "Degenerate: value must be positive and finite");
    return MixingLaw(DegenerateLaw{value});
  }
  static MixingLaw gamma(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0, "Gamma: shape and rate must be positive");
    return MixingLaw(GammaLaw{shape, rate});
  }
  static MixingLaw inverse_gamma(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0, "InverseGamma: shape and rate must be positive");
    return MixingLaw(InverseGammaLaw{shape, rate});
  }
  static MixingLaw log_normal(double mu, double sigma2) {
    require(std::isfinite(mu) && sigma2 > 0.0, "LogNormal: requires finite mu, sigma2 > 0");
    return MixingLaw(LogNormalLaw{mu, sigma2});
  }
  static MixingLaw normal(double mu, double sigma2) {
    require(std::isfinite(mu) && sigma2 > 0.0, "Normal: requires finite mu, sigma2 > 0");
    return MixingLaw(NormalLaw{mu, sigma2});
  }
  static MixingLaw discrete(std::vector<std::pair<double, double>> atoms) {
    require(!atoms.empty(), "Discrete: needs at least one atom");
    double total = 0.0;
    for (const auto& [theta, weight] : atoms) {
      require(theta > 0.0 && std::isfinite(theta), "Discrete: atoms must be positive");
      require(weight > 0.0, "Discrete: weights must be positive");
      total += weight;
    }
    require(std::fabs(total - 1.0) <= 1e-12, "Discrete: weights must sum to 1 within 1e-12");
    std::sort(atoms.begin(), atoms.end());
    for (std::size_t i = 1; i < atoms.size(); ++i) {
      require(atoms[i].first > atoms[i - 1].first, "Discrete: duplicate atom locations");
    }
    return MixingLaw(DiscreteLaw{std::move(atoms)});
  }

  const Variant& variant() const { return v_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  Support support() const {
    const double inf = std::numeric_limits<double>::infinity();
    if (const auto* d = get_if<DegenerateLaw>()) return {d->value, d->value};
    if (get_if<GammaLaw>() || get_if<InverseGammaLaw>() || get_if<LogNormalLaw>()) {
      return {0.0, inf};
    }
    if (get_if<NormalLaw>()) return {-inf, inf};
    if (const auto* d = get_if<DiscreteLaw>()) {
      return {d->atoms.front().first, d->atoms.back().first};
    }
    const auto& p = std::get<PushforwardLaw>(v_);
    const Support s = p.base->support();
    // The registered maps extend continuously to the support closure under
    // IEEE limit arithmetic (1/0 = inf, exp(-inf) = 0).
    const double a = p.map(s.lo), b = p.map(s.hi);
    return {std::min(a, b), std::max(a, b)};
  }

  bool is_continuous() const {
    if (get_if<DegenerateLaw>() || get_if<DiscreteLaw>()) return false;
    if (const auto* p = get_if<PushforwardLaw>()) return p->base->is_continuous();
    return true;
  }

  // Whether all mass lies on (0, inf): the requirement on a mixing
  // distribution proper. Decided analytically per variant.
  bool mass_on_positive() const {
    const Support s = support();
    if (s.lo > 0.0) return true;
    return s.lo == 0.0 && is_continuous();
  }

  double sample(SplitStream& stream) const {
    struct Visitor {
      SplitStream& s;
      double operator()(const DegenerateLaw& l) const { return l.value; }
      double operator()(const GammaLaw& l) const { return s.gamma(l.shape, l.rate); }
      double operator()(const InverseGammaLaw& l) const { return 1.0 / s.gamma(l.shape, l.rate); }
      double operator()(const LogNormalLaw& l) const {
        return std::exp(l.mu + std::sqrt(l.sigma2) * s.normal01());
      }
      double operator()(const NormalLaw& l) const {
        return l.mu + std::sqrt(l.sigma2) * s.normal01();
      }
      double operator()(const DiscreteLaw& l) const {
        const double u = s.uniform01();
        double cum = 0.0;
        for (const auto& [theta, weight] : l.atoms) {
          cum += weight;
          if (u <= cum) return theta;
        }
        return l.atoms.back().first;
      }
      double operator()(const PushforwardLaw& l) const { return l.map(l.base->sample(s)); }
    };
    return std::visit(Visitor{stream}, v_);
  }

  // Lebesgue density; 0 outside the support. Atomic variants have none.
  double density(double x) const {
    struct Visitor {
      double x;
      double operator()(const DegenerateLaw&) const {
        throw UnsupportedOperation("density: Degenerate law has no density");
        return 0.0;
      }
      double operator()(const GammaLaw& l) const {
        if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
        return std::exp(l.shape * std::log(l.rate) - log_gamma(l.shape) +
                        (l.shape - 1.0) * std::log(x) - l.rate * x);
      }
      double operator()(const InverseGammaLaw& l) const {
        if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
        return std::exp(l.shape * std::log(l.rate) - log_gamma(l.shape) -
                        (l.shape + 1.0) * std::log(x) - l.rate / x);
      }
      double operator()(const LogNormalLaw& l) const {
        if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
        const double sigma = std::sqrt(l.sigma2);
        const double z = (std::log(x) - l.mu) / sigma;
        return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
      }
      double operator()(const NormalLaw& l) const {
        if (!std::isfinite(x)) return 0.0;
        const double sigma = std::sqrt(l.sigma2);
        const double z = (x - l.mu) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
      }
      double operator()(const DiscreteLaw&) const {
        throw UnsupportedOperation("density: Discrete law has no density");
        return 0.0;
      }
      double operator()(const PushforwardLaw& l) const {
        if (!l.map.has_inverse() || l.map.inverse_derivative == nullptr) {
          throw UnsupportedOperation(
              "density: pushforward needs a map with a differentiable inverse");
        }
        if (!std::isfinite(x)) return 0.0;
        const double theta = l.map.inverse(x);
        if (!std::isfinite(theta)) return 0.0;
        const double jac = std::fabs(l.map.inverse_derivative(x));
        if (!std::isfinite(jac)) return 0.0;
        return l.base->density(theta) * jac;
      }
    };
    return std::visit(Visitor{x}, v_);
  }

  double cdf(double x) const {
    struct Visitor {
      double x;
      double operator()(const DegenerateLaw& l) const { return x >= l.value ? 1.0 : 0.0; }
      double operator()(const GammaLaw& l) const {
        return x > 0.0 ? regularized_gamma_p(l.shape, l.rate * x) : 0.0;
      }
      double operator()(const InverseGammaLaw& l) const {
        if (!(x > 0.0)) return 0.0;
        return std::isinf(x) ? 1.0 : regularized_gamma_q(l.shape, l.rate / x);
      }
      double operator()(const LogNormalLaw& l) const {
        return x > 0.0 ? normal_cdf((std::log(x) - l.mu) / std::sqrt(l.sigma2)) : 0.0;
      }
      double operator()(const NormalLaw& l) const {
        return normal_cdf((x - l.mu) / std::sqrt(l.sigma2));
      }
      double operator()(const DiscreteLaw& l) const {
        double cum = 0.0;
        for (const auto& [theta, weight] : l.atoms) {
          if (theta <= x) cum += weight;
        }
        return cum;
      }
      double operator()(const PushforwardLaw& l) const {
        if (!l.map.has_inverse()) {
          throw UnsupportedOperation("cdf: pushforward needs an invertible map");
        }
        // Image bounds first: keeps the inverse away from arguments outside
        // the image (log of a negative number and friends).
        const Support bs = l.base->support();
        const double m1 = l.map(bs.lo), m2 = l.map(bs.hi);
        if (x <= std::min(m1, m2)) return 0.0;  // base is continuous: boundary is null
        if (x >= std::max(m1, m2)) return 1.0;
        const double theta = l.map.inverse(x);
        if (l.map.monotonicity > 0) return l.base->cdf(theta);
        // Decreasing map: {h(T) <= x} = {T >= inverse(x)}, boundary null.
        return 1.0 - l.base->cdf(theta);
      }
    };
    if (std::isnan(x)) throw DomainError("cdf: NaN argument");
    return std::visit(Visitor{x}, v_);
  }

  double quantile(double p) const {
    struct Visitor {
      double p;
      double operator()(const DegenerateLaw& l) const { return l.value; }
      double operator()(const GammaLaw& l) const { return gamma_quantile(l.shape, l.rate, p); }
      double operator()(const InverseGammaLaw& l) const {
        return l.rate / gamma_quantile(l.shape, 1.0, 1.0 - p);
      }
      double operator()(const LogNormalLaw& l) const {
        return std::exp(l.mu + std::sqrt(l.sigma2) * normal_quantile(p));
      }
      double operator()(const NormalLaw& l) const {
        return l.mu + std::sqrt(l.sigma2) * normal_quantile(p);
      }
      double operator()(const DiscreteLaw& l) const {
        double cum = 0.0;
        for (const auto& [theta, weight] : l.atoms) {
          cum += weight;
          if (cum >= p) return theta;
        }
        return l.atoms.back().first;
      }
      double operator()(const PushforwardLaw& l) const {
        if (l.map.monotonicity > 0) return l.map(l.base->quantile(p));
        return l.map(l.base->quantile(1.0 - p));
      }
    };
    if (!(p >= 0.0 && p < 1.0)) {
      // p = 1 is excluded: upper endpoints may be infinite.
      throw DomainError("quantile: requires p in [0,1)");
    }
    if (p == 0.0) return support().lo;
    return std::visit(Visitor{p}, v_);
  }

  std::string describe() const {
    struct Visitor {
      std::string operator()(const DegenerateLaw& l) const {
        return "degenerate(" + fmt(l.value) + ")";
      }
      std::string operator()(const GammaLaw& l) const {
        return "gamma(shape=" + fmt(l.shape) + ", rate=" + fmt(l.rate) + ")";
      }
      std::string operator()(const InverseGammaLaw& l) const {
        return "inverse_gamma(shape=" + fmt(l.shape) + ", rate=" + fmt(l.rate) + ")";
      }
      std::string operator()(const LogNormalLaw& l) const {
        return "log_normal(mu=" + fmt(l.mu) + ", sigma2=" + fmt(l.sigma2) + ")";
      }
      std::string operator()(const NormalLaw& l) const {
        return "normal(mu=" + fmt(l.mu) + ", sigma2=" + fmt(l.sigma2) + ")";
      }
      std::string operator()(const DiscreteLaw& l) const {
        return "discrete(" + std::to_string(l.atoms.size()) + " atoms)";
      }
      std::string operator()(const PushforwardLaw& l) const {
        return "pushforward(" + l.base->describe() + ", " + std::string(l.map.name) + ")";
      }
      static std::string fmt(double x) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", x);
        return buf;
      }
    };
    return std::visit(Visitor{}, v_);
  }

 private:
  explicit MixingLaw(Variant v) : v_(std::move(v)) {}
  friend MixingLaw pushforward(const MixingLaw& base, const Transform& map);

  static void require(bool ok, const char* msg) {
    if (!ok) throw DomainError(msg);
  }

  Variant v_;
};

inline MixingLaw pushforward(const MixingLaw& base, const Transform& map) {
  if (map.name == "identity") return base;
  Support s = base.support();
  if (base.is_continuous()) {
    // Continuous supports are open at their endpoints (measure zero there),
    // so the map only needs the interior: [0,inf) support admits 1/theta.
    s.lo = std::nextafter(s.lo, std::numeric_limits<double>::infinity());
    s.hi = std::nextafter(s.hi, -std::numeric_limits<double>::infinity());
  }
  if (!map.domain_covers(s.lo, s.hi)) {
    throw DomainError(std::string("pushforward: transform '") + std::string(map.name) +
                      "' is not defined on the whole base support");
  }
  // Atomic bases collapse to atomic laws right away; keeps them exact and
  // guarantees a stored pushforward always wraps a continuous base.
  if (const auto* d = base.get_if<DegenerateLaw>()) {
    return MixingLaw::degenerate(map(d->value));
  }
  if (const auto* d = base.get_if<DiscreteLaw>()) {
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(d->atoms.size());
    for (const auto& [theta, weight] : d->atoms) atoms.emplace_back(map(theta), weight);
    return MixingLaw::discrete(std::move(atoms));
  }
  if (const auto* p = base.get_if<PushforwardLaw>()) {
    // Avoid chains when the inner map is the identity.
    if (p->map.name == "identity") return pushforward(*p->base, map);
  }
  return MixingLaw(MixingLaw::Variant(PushforwardLaw{std::make_shared<MixingLaw>(base), map}));
}

// E[f(Theta)] for Theta ~ law. Atomic laws sum; continuous laws integrate by
// adaptive quadrature over the quantile-truncated support, discarding
// tail_mass of probability on each side. Pushforwards reduce to their base:
// E[f(h(T))] needs no change of variables.
template <class F>
double expect(const MixingLaw& law, F&& f, const QuadratureControl& control = {},
              double tail_mass = 1e-14) {
  // Unwrap pushforward layers iteratively (outermost first) so the template
  // instantiation depth stays flat no matter how maps are stacked.
  const MixingLaw* base = &law;
  std::vector<const Transform*> maps;
  while (const auto* p = base->get_if<PushforwardLaw>()) {
    maps.push_back(&p->map);
    base = p->base.get();
  }
  auto g = [&](double theta) {
    for (auto it = maps.rbegin(); it != maps.rend(); ++it) theta = (**it)(theta);
    return f(theta);
  };
  if (const auto* d = base->get_if<DegenerateLaw>()) return g(d->value);
  if (const auto* d = base->get_if<DiscreteLaw>()) {
    double sum = 0.0;
    for (const auto& [theta, weight] : d->atoms) sum += weight * g(theta);
    return sum;
  }
  if (!(tail_mass > 0.0 && tail_mass < 0.5)) {
    throw DomainError("expect: tail_mass must lie in (0, 0.5)");
  }
  const double lo = base->quantile(tail_mass);
  const double hi = base->quantile(1.0 - tail_mass);
  auto integrand = [&](double theta) { return g(theta) * base->density(theta); };
  return integrate_adaptive(integrand, lo, hi, control).value;
}

}  // namespace mppv
