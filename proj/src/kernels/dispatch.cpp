#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "discospec/errors.hpp"
#include "discospec/kernels.hpp"

namespace discospec::kernels {

namespace {

Isa initial_isa() {
  const Isa detected = detected_isa();
  if (const char* env = std::getenv("DISCOSPEC_SIMD")) {
    const std::string v = env;
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && detected == Isa::Avx2) return Isa::Avx2;
  }
  return detected;
}

Isa& current() {
  static Isa isa = initial_isa();
  return isa;
}

void combine(ProductResult& acc, const ProductResult& part) {
  const double re = acc.re * part.re - acc.im * part.im;
  const double im = acc.re * part.im + acc.im * part.re;
  acc.re = re;
  acc.im = im;
  acc.exponent += part.exponent;
  acc.weight += part.weight;
}

// Remainder factors not covered by the lane kernels; identical for every ISA.
ProductResult remainder_product(const double* kappa, std::size_t n, double lre, double lim) {
  ProductResult r;
  const double labs = std::hypot(lre, lim);
  for (std::size_t j = 0; j < n; ++j) {
    const double fr = 1.0 - lre / kappa[j];
    const double fi = -(lim / kappa[j]);
    const double re = r.re * fr - r.im * fi;
    const double im = r.re * fi + r.im * fr;
    r.re = re;
    r.im = im;
    r.weight += (1.0 + labs / std::abs(kappa[j])) / std::sqrt(fr * fr + fi * fi);
  }
  return r;
}

}  // namespace

Isa detected_isa() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

Isa active_isa() { return current(); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) throw ContractError("AVX2 is not available on this CPU");
  current() = isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void propagate_lanes(const PropagationInput& in, const double* lambda, const int* substeps, LaneState* out) {
  if (current() == Isa::Avx2)
    propagate_lanes_avx2(in, lambda, substeps, out);
  else
    propagate_lanes_scalar(in, lambda, substeps, out);
}

ProductResult factor_product(const double* kappa, std::size_t n, double lambda_re, double lambda_im) {
  const std::size_t body = n - n % kLanes;
  ProductResult r = current() == Isa::Avx2 ? factor_product_avx2(kappa, body, lambda_re, lambda_im)
                                           : factor_product_scalar(kappa, body, lambda_re, lambda_im);
  combine(r, remainder_product(kappa + body, n - body, lambda_re, lambda_im));
  return r;
}

int substeps_for(double lambda_abs, double qmax, double max_width, double phase_limit) {
  const double phase = std::sqrt(lambda_abs + qmax) * max_width;
  const double m = std::ceil(phase / phase_limit);
  if (!std::isfinite(m)) throw DomainError("substep count overflow (non-finite lambda)");
  return std::max(1, static_cast<int>(std::min(m, 1e6)));
}

}  // namespace discospec::kernels
