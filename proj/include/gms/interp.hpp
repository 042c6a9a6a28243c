#pragma once

#include <cstddef>
#include <vector>

#include "gms/common.hpp"

namespace gms {

// Function tabulated at x_i = -L + i dx, evaluated by Catmull-Rom cubic
// interpolation; queries outside the window clamp to the edge values.
struct TableFn {
  double L = 0.0, dx = 0.0;
  std::vector<double> v;

  double operator()(double x) const {
    if (v.empty()) throw Error("TableFn: empty table");
    const double u = (x + L) / dx;
    const auto n = std::ptrdiff_t(v.size());
    if (u <= 1.0) return v.front();
    if (u >= double(n - 2)) return v.back();
    const auto i = std::ptrdiff_t(u);
    const double s = u - double(i);
    const double p0 = v[i - 1], p1 = v[i], p2 = v[i + 1], p3 = v[i + 2];
    return p1 + 0.5 * s * (p2 - p0 +
                           s * (2 * p0 - 5 * p1 + 4 * p2 - p3 + s * (3 * (p1 - p2) + p3 - p0)));
  }
};

}  // namespace gms
