#pragma once

#include <algorithm>
#include <cmath>

#include "discospec/detail/transfer.hpp"
#include "discospec/kernels.hpp"

namespace discospec::kernels::detail_lanes {

// Renormalize every this many factors per lane.
inline constexpr std::size_t kRenormEvery = 8;

inline ProductResult combine_lanes(const double* re, const double* im, const double* ex, const double* w) {
  ProductResult r{re[0], im[0], ex[0], w[0]};
  for (int l = 1; l < kLanes; ++l) {
    const double nr = r.re * re[l] - r.im * im[l];
    const double ni = r.re * im[l] + r.im * re[l];
    r.re = nr;
    r.im = ni;
    r.exponent += ex[l];
    r.weight += w[l];
  }
  const double mx = std::max(std::abs(r.re), std::abs(r.im));
  if (mx > 0.0 && std::isfinite(mx)) {
    double k;
    const double s = discospec::detail::renorm_scale(mx, k);
    r.re *= s;
    r.im *= s;
    r.exponent += k;
  }
  return r;
}

}  // namespace discospec::kernels::detail_lanes
