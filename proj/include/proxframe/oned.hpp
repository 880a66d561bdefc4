#pragma once

#include <cmath>

#include "proxframe/errors.hpp"

namespace proxframe {

/// Closed interval [lo, hi]; a singleton when lo == hi.
struct Interval {
  double lo;
  double hi;

  bool is_singleton() const { return lo == hi; }
  bool contains(double v, double slack = 0.0) const {
    return v >= lo - slack && v <= hi + slack;
  }
};

namespace detail {

inline void check_toy_params(double c, double gamma) {
  if (!(c >= 1.0) || !std::isfinite(c))
    throw DomainError("toy frame parameter c must be finite and >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("threshold gamma must be finite and > 0");
}

// Breakpoint between the linear and the saturated branch.
inline double toy_breakpoint(double c, double gamma) {
  return gamma * (c - 1.0) * c / (c * c + 1.0);
}

}  // namespace detail

/// Closed form of the subgradient set induced by the two-row frame (1, c)^T
/// with c >= 1: the interval gamma*[-1/c, 1/c] at x = 0, the value
/// gamma/c + x/c^2 on (0, x*], and the constant gamma*(1+c)/(1+c^2) beyond
/// x* = gamma*(c-1)*c/(c^2+1); odd reflection for x < 0.
inline Interval subgradient_1d(double c, double gamma, double x) {
  detail::check_toy_params(c, gamma);
  if (x == 0.0) return {-gamma / c, gamma / c};
  const double ax = std::abs(x);
  const double bp = detail::toy_breakpoint(c, gamma);
  double v = ax <= bp ? gamma / c + ax / (c * c)
                      : gamma * (1.0 + c) / (1.0 + c * c);
  if (x < 0.0) v = -v;
  return {v, v};
}

/// The matching convex potential: even, continuous, piecewise quadratic
/// then affine, with slope given by subgradient_1d.
inline double potential_1d(double c, double gamma, double x) {
  detail::check_toy_params(c, gamma);
  const double ax = std::abs(x);
  const double bp = detail::toy_breakpoint(c, gamma);
  if (ax <= bp) return gamma * ax / c + ax * ax / (2.0 * c * c);
  const double cc = c * c + 1.0;
  return gamma * (1.0 + c) / cc * ax - gamma * gamma * (c - 1.0) * (c - 1.0) / (2.0 * cc * cc);
}

}  // namespace proxframe
