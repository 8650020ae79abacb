#include <algorithm>
#include <cmath>

#include "discospec/detail/transfer.hpp"
#include "discospec/kernels.hpp"
#include "lane_common.hpp"

namespace discospec::kernels {

using discospec::detail::cos_sinc;
using discospec::detail::renorm_scale;

void propagate_lanes_scalar(const PropagationInput& in, const double* lambda, const int* substeps, LaneState* out) {
  for (int lane = 0; lane < kLanes; ++lane) {
    double y = 1.0, p = in.h, e = 0.0, zeros = 0.0;
    const double m = static_cast<double>(substeps[lane]);
    for (std::size_t c = 0; c < in.cells; ++c) {
      if (c == in.jump_cell) {
        p = p / in.a1 + in.a2 * y;
        y = in.a1 * y;
      }
      const double d = in.width[c] / m;
      const double g = in.qbar[c] - lambda[lane];
      const double v = g * d * d;
      double cc, ss;
      cos_sinc(v, cc, ss);
      ss = ss * d;
      const double gs = g * ss;
      for (int j = 0; j < substeps[lane]; ++j) {
        const double y1 = cc * y + ss * p;
        const double p1 = gs * y + cc * p;
        if (y != 0.0 && (y1 == 0.0 || std::signbit(y) != std::signbit(y1))) zeros += 1.0;
        y = y1;
        p = p1;
        double k;
        const double s = renorm_scale(std::max(std::abs(y), std::abs(p)), k);
        y *= s;
        p *= s;
        e += k;
      }
    }
    out[lane] = LaneState{y, p, e, zeros};
  }
}

ProductResult factor_product_scalar(const double* kappa, std::size_t n, double lre, double lim) {
  double re[kLanes], im[kLanes], ex[kLanes], w[kLanes];
  std::fill(re, re + kLanes, 1.0);
  std::fill(im, im + kLanes, 0.0);
  std::fill(ex, ex + kLanes, 0.0);
  std::fill(w, w + kLanes, 0.0);
  const double labs = std::hypot(lre, lim);
  std::size_t block = 0;
  for (std::size_t i = 0; i + kLanes <= n; i += kLanes) {
    for (int l = 0; l < kLanes; ++l) {
      const double kap = kappa[i + l];
      const double fr = 1.0 - lre / kap;
      const double fi = -(lim / kap);
      const double nr = re[l] * fr - im[l] * fi;
      const double ni = re[l] * fi + im[l] * fr;
      re[l] = nr;
      im[l] = ni;
      w[l] += (1.0 + labs / std::abs(kap)) / std::sqrt(fr * fr + fi * fi);
    }
    if (++block % detail_lanes::kRenormEvery == 0) {
      for (int l = 0; l < kLanes; ++l) {
        const double mx = std::max(std::abs(re[l]), std::abs(im[l]));
        if (!(mx > 0.0)) continue;
        double k;
        const double s = renorm_scale(mx, k);
        re[l] *= s;
        im[l] *= s;
        ex[l] += k;
      }
    }
  }
  return detail_lanes::combine_lanes(re, im, ex, w);
}

}  // namespace discospec::kernels
