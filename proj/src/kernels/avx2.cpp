#include <algorithm>
#include <cmath>

#include "discospec/detail/transfer.hpp"
#include "discospec/kernels.hpp"
#include "lane_common.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define DISCOSPEC_HAVE_AVX2_PATH 1
#endif

namespace discospec::kernels {

#ifdef DISCOSPEC_HAVE_AVX2_PATH

namespace {

using discospec::detail::kCosCoef;
using discospec::detail::kSincCoef;
using discospec::detail::kTaylorTerms;

#define DS_AVX2 __attribute__((target("avx2")))

DS_AVX2 inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

// x * 2^-k with x*2^-k in [0.5,1); k added to `ex`. Lanes with mx == 0 are left untouched.
DS_AVX2 inline __m256d renorm_factor(__m256d mx, __m256d& ex) {
  const __m256i bits = _mm256_castpd_si256(mx);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256i scale_bits = _mm256_slli_epi64(_mm256_sub_epi64(_mm256_set1_epi64x(2045), biased), 52);
  // exact int64 -> double for small non-negative integers
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  const __m256d biased_d =
      _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(magic))), magic);
  const __m256d k = _mm256_sub_pd(biased_d, _mm256_set1_pd(1022.0));
  const __m256d nonzero = _mm256_cmp_pd(mx, _mm256_setzero_pd(), _CMP_GT_OQ);
  ex = _mm256_add_pd(ex, _mm256_and_pd(nonzero, k));
  return _mm256_blendv_pd(_mm256_set1_pd(1.0), _mm256_castsi256_pd(scale_bits), nonzero);
}

}  // namespace

DS_AVX2 void propagate_lanes_avx2(const PropagationInput& in, const double* lambda, const int* substeps,
                                  LaneState* out) {
  const __m256d lam = _mm256_loadu_pd(lambda);
  const __m256d m = _mm256_setr_pd(substeps[0], substeps[1], substeps[2], substeps[3]);
  const int mmax = *std::max_element(substeps, substeps + kLanes);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d a1 = _mm256_set1_pd(in.a1);
  const __m256d a2 = _mm256_set1_pd(in.a2);

  __m256d y = one;
  __m256d p = _mm256_set1_pd(in.h);
  __m256d e = zero;
  __m256d zeros = zero;

  for (std::size_t c = 0; c < in.cells; ++c) {
    if (c == in.jump_cell) {
      p = _mm256_add_pd(_mm256_div_pd(p, a1), _mm256_mul_pd(a2, y));
      y = _mm256_mul_pd(a1, y);
    }
    const __m256d d = _mm256_div_pd(_mm256_set1_pd(in.width[c]), m);
    const __m256d g = _mm256_sub_pd(_mm256_set1_pd(in.qbar[c]), lam);
    const __m256d v = _mm256_mul_pd(_mm256_mul_pd(g, d), d);
    __m256d cc = _mm256_set1_pd(kCosCoef[kTaylorTerms - 1]);
    __m256d ss = _mm256_set1_pd(kSincCoef[kTaylorTerms - 1]);
    for (int k = kTaylorTerms - 2; k >= 0; --k) {
      cc = _mm256_add_pd(_mm256_mul_pd(cc, v), _mm256_set1_pd(kCosCoef[k]));
      ss = _mm256_add_pd(_mm256_mul_pd(ss, v), _mm256_set1_pd(kSincCoef[k]));
    }
    ss = _mm256_mul_pd(ss, d);
    const __m256d gs = _mm256_mul_pd(g, ss);

    for (int j = 0; j < mmax; ++j) {
      const __m256d active = _mm256_cmp_pd(_mm256_set1_pd(static_cast<double>(j)), m, _CMP_LT_OQ);
      __m256d y1 = _mm256_add_pd(_mm256_mul_pd(cc, y), _mm256_mul_pd(ss, p));
      __m256d p1 = _mm256_add_pd(_mm256_mul_pd(gs, y), _mm256_mul_pd(cc, p));
      y1 = _mm256_blendv_pd(y, y1, active);
      p1 = _mm256_blendv_pd(p, p1, active);

      const __m256i sign_diff =
          _mm256_cmpgt_epi64(_mm256_setzero_si256(), _mm256_castpd_si256(_mm256_xor_pd(y, y1)));
      const __m256d y1_zero = _mm256_cmp_pd(y1, zero, _CMP_EQ_OQ);
      const __m256d y0_nonzero = _mm256_cmp_pd(y, zero, _CMP_NEQ_UQ);
      const __m256d crossed =
          _mm256_and_pd(y0_nonzero, _mm256_or_pd(y1_zero, _mm256_castsi256_pd(sign_diff)));
      zeros = _mm256_add_pd(zeros, _mm256_and_pd(crossed, one));

      const __m256d mx = _mm256_max_pd(abs_pd(y1), abs_pd(p1));
      const __m256d s = renorm_factor(mx, e);
      y = _mm256_mul_pd(y1, s);
      p = _mm256_mul_pd(p1, s);
    }
  }

  alignas(32) double ys[kLanes], ps[kLanes], es[kLanes], zs[kLanes];
  _mm256_store_pd(ys, y);
  _mm256_store_pd(ps, p);
  _mm256_store_pd(es, e);
  _mm256_store_pd(zs, zeros);
  for (int l = 0; l < kLanes; ++l) out[l] = LaneState{ys[l], ps[l], es[l], zs[l]};
}

DS_AVX2 ProductResult factor_product_avx2(const double* kappa, std::size_t n, double lre, double lim) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d vlre = _mm256_set1_pd(lre);
  const __m256d vlim = _mm256_set1_pd(lim);
  const __m256d labs = _mm256_set1_pd(std::hypot(lre, lim));
  __m256d re = one, im = _mm256_setzero_pd(), ex = _mm256_setzero_pd(), w = _mm256_setzero_pd();
  std::size_t block = 0;
  for (std::size_t i = 0; i + kLanes <= n; i += kLanes) {
    const __m256d kap = _mm256_loadu_pd(kappa + i);
    const __m256d fr = _mm256_sub_pd(one, _mm256_div_pd(vlre, kap));
    const __m256d fi = _mm256_xor_pd(sign, _mm256_div_pd(vlim, kap));
    const __m256d nr = _mm256_sub_pd(_mm256_mul_pd(re, fr), _mm256_mul_pd(im, fi));
    const __m256d ni = _mm256_add_pd(_mm256_mul_pd(re, fi), _mm256_mul_pd(im, fr));
    re = nr;
    im = ni;
    const __m256d mod = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(fr, fr), _mm256_mul_pd(fi, fi)));
    w = _mm256_add_pd(w, _mm256_div_pd(_mm256_add_pd(one, _mm256_div_pd(labs, abs_pd(kap))), mod));
    if (++block % detail_lanes::kRenormEvery == 0) {
      const __m256d mx = _mm256_max_pd(abs_pd(re), abs_pd(im));
      const __m256d s = renorm_factor(mx, ex);
      re = _mm256_mul_pd(re, s);
      im = _mm256_mul_pd(im, s);
    }
  }
  alignas(32) double res[kLanes], ims[kLanes], exs[kLanes], ws[kLanes];
  _mm256_store_pd(res, re);
  _mm256_store_pd(ims, im);
  _mm256_store_pd(exs, ex);
  _mm256_store_pd(ws, w);
  return detail_lanes::combine_lanes(res, ims, exs, ws);
}

#else

void propagate_lanes_avx2(const PropagationInput& in, const double* lambda, const int* substeps, LaneState* out) {
  propagate_lanes_scalar(in, lambda, substeps, out);
}

ProductResult factor_product_avx2(const double* kappa, std::size_t n, double lre, double lim) {
  return factor_product_scalar(kappa, n, lre, lim);
}

#endif

}  // namespace discospec::kernels
