#pragma once

#include "aharm/types.hpp"

namespace aharm {

/* Five-point central first derivative, truncation error h^4 f^(5)/30.
 * F maps a real offset to any type supporting +, -, and scaling. */
template <class F>
auto deriv5(F&& f, double h) -> decltype(f(0.0)) {
  return (f(-2.0 * h) - f(2.0 * h) + 8.0 * (f(h) - f(-h))) * (1.0 / (12.0 * h));
}

/* Derivative along coordinate axis `axis` of a field defined on chart points. */
template <class F>
auto deriv5_axis(F&& f, const Vec& u, int axis, double h) -> decltype(f(u)) {
  return deriv5(
      [&](double s) {
        Vec v = u;
        v[axis] += s;
        return f(v);
      },
      h);
}

} // namespace aharm
