#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and an AVX2 variant
// chosen at run time; both follow the same operation order so their results agree bit for bit.

#include <cstddef>
#include <string_view>

namespace discospec::kernels {

inline constexpr int kLanes = 4;

enum class Isa { Scalar, Avx2 };

/// Best ISA supported by the running CPU.
Isa detected_isa();
/// ISA used by the dispatching entry points: DISCOSPEC_SIMD=scalar|avx2|auto, else detected.
Isa active_isa();
/// Override for tests; throws if the CPU lacks the requested ISA.
void force_isa(Isa isa);
std::string_view isa_name(Isa isa);

/// Frozen-coefficient propagation of y(0)=1, y'(0)=h through a cell table, one lambda per lane.
struct PropagationInput {
  const double* width = nullptr;
  const double* qbar = nullptr;
  std::size_t cells = 0;
  std::size_t jump_cell = 0;
  double h = 0.0;
  double a1 = 1.0;
  double a2 = 0.0;
};

/// State at x = 1 is (y, dy) * 2^exponent; `zeros` counts sign changes of y on (0,1].
struct LaneState {
  double y = 0.0;
  double dy = 0.0;
  double exponent = 0.0;
  double zeros = 0.0;
};

/// Each cell is split into `substeps[lane]` equal steps; callers choose it so that the phase
/// sqrt|lambda - qbar| * step stays below 3 (required for the sign-change zero count).
void propagate_lanes_scalar(const PropagationInput& in, const double* lambda, const int* substeps, LaneState* out);
void propagate_lanes_avx2(const PropagationInput& in, const double* lambda, const int* substeps, LaneState* out);
void propagate_lanes(const PropagationInput& in, const double* lambda, const int* substeps, LaneState* out);

/// prod_j (1 - lambda/kappa_j) as (re + i im) * 2^exponent, plus the rounding weight
/// sum_j (1 + |lambda/kappa_j|) / |1 - lambda/kappa_j|.
struct ProductResult {
  double re = 1.0;
  double im = 0.0;
  double exponent = 0.0;
  double weight = 0.0;
};

ProductResult factor_product_scalar(const double* kappa, std::size_t n, double lambda_re, double lambda_im);
ProductResult factor_product_avx2(const double* kappa, std::size_t n, double lambda_re, double lambda_im);
ProductResult factor_product(const double* kappa, std::size_t n, double lambda_re, double lambda_im);

/// Substeps per cell keeping sqrt(|lambda| + qmax) * max_width / substeps <= phase_limit.
int substeps_for(double lambda_abs, double qmax, double max_width, double phase_limit);

}  // namespace discospec::kernels
