#pragma once
// Named measurable maps applied to mixing parameters. A Transform is a value
// type built from plain function pointers so laws and kernels stay copyable
// and immutable. The registered maps are the ones the worked scenarios need;
// monotonicity is declared relative to any interval the domain check accepts.

#include <cmath>
#include <string>
#include <string_view>

#include "mppv/errors.hpp"

namespace mppv {

struct Transform {
  std::string_view name;
  double (*forward)(double);
  // Optional: present only for maps registered with an inverse.
  double (*inverse)(double);
  double (*inverse_derivative)(double);
  // Whether the map is defined (and monotone) on the closed interval [lo,hi].
  bool (*domain_covers)(double lo, double hi);
  int monotonicity;  // +1 increasing, -1 decreasing on any covered interval

  bool has_inverse() const { return inverse != nullptr; }
  double operator()(double x) const { return forward(x); }

  double apply_inverse(double y) const {
    if (!has_inverse()) {
      throw UnsupportedOperation(std::string("transform '") + std::string(name) +
                                 "' has no registered inverse");
    }
    return inverse(y);
  }
};

namespace detail {

inline double id_fwd(double x) { return x; }
inline double id_deriv(double) { return 1.0; }
inline bool id_covers(double, double) { return true; }

inline double recip_fwd(double x) { return 1.0 / x; }
inline double recip_inv_deriv(double y) { return -1.0 / (y * y); }
// 1/x is undefined at 0 and only branchwise monotone, so the covered
// intervals must not straddle the origin.
inline bool recip_covers(double lo, double hi) { return lo > 0.0 || hi < 0.0; }

inline double exp_fwd(double x) { return std::exp(x); }
inline double exp_inv(double y) { return std::log(y); }
inline double exp_inv_deriv(double y) { return 1.0 / y; }
inline bool exp_covers(double, double) { return true; }

}  // namespace detail

inline const Transform& identity_transform() {
  static const Transform t{"identity", detail::id_fwd,    detail::id_fwd,
                           detail::id_deriv, detail::id_covers, +1};
  return t;
}

inline const Transform& reciprocal_transform() {
  static const Transform t{"reciprocal",      detail::recip_fwd,    detail::recip_fwd,
                           detail::recip_inv_deriv, detail::recip_covers, -1};
  return t;
}

inline const Transform& exp_transform() {
  static const Transform t{"exp",          detail::exp_fwd,      detail::exp_inv,
                           detail::exp_inv_deriv, detail::exp_covers, +1};
  return t;
}

inline const Transform& transform_by_name(std::string_view name) {
  if (name == "identity") return identity_transform();
  if (name == "reciprocal") return reciprocal_transform();
  if (name == "exp") return exp_transform();
  throw DomainError("unknown transform '" + std::string(name) +
                    "' (expected identity, reciprocal, or exp)");
}

}  // namespace mppv
