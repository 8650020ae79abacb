#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "discospec/grid.hpp"
#include "discospec/problem.hpp"
#include "discospec/scaled.hpp"

namespace discospec {

/// Phase bound per substep for the real eigenvalue kernel (keeps sign-change counting exact).
inline constexpr double kCountPhase = 3.0;
/// Phase bound per substep for complex walks and quadrature.
inline constexpr double kQuadPhase = 1.0;

enum class JumpSide { Left, Right };

/// (y, y') at x, times exp(log_scale).
struct ScaledState {
  StateVector state;
  double log_scale = 0.0;

  StateVector value() const;
};

/// Solution with y(0)=1, y'(0)=h at x_stop. At x_stop = 1/2 `side` selects the one-sided limit.
ScaledState propagate(const ProblemSpec& problem, std::complex<double> lambda, const PropagatorConfig& cfg = {},
                      double x_stop = 1.0, JumpSide side = JumpSide::Right);

/// Fundamental matrix from 0 to x_stop, row-major [[y1, y2], [y1', y2']] for the initial states
/// (1,0) and (0,1), jump included past 1/2.
std::array<std::complex<double>, 4> transfer_matrix(const ProblemSpec& problem, std::complex<double> lambda,
                                                    const PropagatorConfig& cfg = {}, double x_stop = 1.0);

/// Delta(lambda) = y'(1) + H y(1), or y(1) for the Dirichlet condition.
std::complex<double> characteristic(const ProblemSpec& problem, std::complex<double> lambda,
                                    const PropagatorConfig& cfg = {});
ScaledComplex characteristic_scaled(const ProblemSpec& problem, std::complex<double> lambda,
                                    const PropagatorConfig& cfg = {});

/// Real-lambda evaluator over a fixed cell grid, batched through the lane kernels.
class RealEvaluator {
 public:
  RealEvaluator(const ProblemSpec& problem, const PropagatorConfig& cfg);
  RealEvaluator(const ProblemSpec& problem, CellGrid grid);

  struct Sample {
    double delta_mantissa = 0.0;  // Delta = mantissa * 2^delta_exponent
    double delta_exponent = 0.0;
    long count = 0;               // eigenvalues strictly below lambda
    double theta = 0.0;           // Pruefer angle at x = 1
  };

  std::vector<Sample> evaluate(std::span<const double> lambdas) const;
  Sample evaluate(double lambda) const;

  const ProblemSpec& problem() const { return problem_; }
  const CellGrid& grid() const { return grid_; }

 private:
  ProblemSpec problem_;
  CellGrid grid_;
  double theta_b_;
};

/// Number of eigenvalues strictly below lambda, from the Pruefer phase at x = 1.
long count_below(const ProblemSpec& problem, double lambda, const PropagatorConfig& cfg = {});

/// The eigenvalues with indices 0..n_max.
Spectrum eigenvalues(const ProblemSpec& problem, int n_max, const PropagatorConfig& cfg = {});
/// Selected eigenvalues (any order of non-negative indices; returned in the given order).
std::vector<SpectralValue> eigenvalues_at(const ProblemSpec& problem, std::span<const int> indices,
                                          const PropagatorConfig& cfg = {});
std::vector<SpectralValue> eigenvalues_at(const RealEvaluator& ev, std::span<const int> indices, double refine_tol,
                                          int max_iterations);

/// W(k) = yt'(1) y(1) - yt(1) y'(1) at lambda = k^2, both solutions on the merged grid.
std::complex<double> g_wronskian(const ProblemSpec& b, const ProblemSpec& bt, std::complex<double> k,
                                 const PropagatorConfig& cfg = {});
/// W is constant wherever the potentials agree, so when they agree on [x_eval, 1] with
/// x_eval >= 1/2 the value at x_eval equals W(1). Evaluating early avoids the cancellation of
/// exponentially large terms at x = 1 for large |Im k|.
ScaledComplex g_wronskian_scaled(const ProblemSpec& b, const ProblemSpec& bt, std::complex<double> k,
                                 const PropagatorConfig& cfg = {}, double x_eval = 1.0);

/// Quadratures of the real solution y (y(0)=1, y'(0)=h) at a real lambda.
struct EigenfunctionMoments {
  std::vector<double> cell_integrals;  // integral of y^2 over each [edges[i], edges[i+1]]
  double norm2 = 0.0;                  // integral of y^2 over [0,1]
  double y0 = 1.0;
  double y1 = 0.0;
  double y_half_left = 0.0;
};

EigenfunctionMoments eigenfunction_moments(const ProblemSpec& problem, double lambda, std::span<const double> edges,
                                           const PropagatorConfig& cfg = {});

void check_same_a1(const ProblemSpec& b, const ProblemSpec& bt);

}  // namespace discospec
