#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "discospec/detail/transfer.hpp"
#include "discospec/grid.hpp"
#include "discospec/kernels.hpp"
#include "discospec/problem.hpp"

namespace discospec::detail {

inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const std::complex<double>& x) { return std::abs(x); }
inline double max_part(double x) { return std::abs(x); }
inline double max_part(const std::complex<double>& x) { return std::max(std::abs(x.real()), std::abs(x.imag())); }

/// State (y, y') = (y, p) * exp(log_scale).
template <class T>
struct WalkState {
  T y;
  T p;
  double log_scale = 0.0;
};

/// Solution of -y'' + qbar y = lambda y over a local step t from (y0, p0), g = qbar - lambda.
template <class T>
inline void local_solution(const T& g, double t, const T& y0, const T& p0, T& y, T& p) {
  T c, s;
  cos_sinc(T(g * (t * t)), c, s);
  s = s * t;
  y = c * y0 + s * p0;
  p = g * s * y0 + c * p0;
}

enum class StopSide { Left, Right };

/// Walk the frozen-coefficient solution with y(0)=y0, y'(0)=p0 from 0 to x_stop.
/// `visit(x0, d, g, y0, p0, log_scale)` is called for every substep [x0, x0+d] with the state
/// at its left end. At x_stop == 1/2, StopSide selects the state before or after the jump.
template <class T, class Visitor>
WalkState<T> walk(const CellGrid& grid, const T& y0, const T& p0, const Transmission& jump, const T& lambda,
                  double x_stop, StopSide side, double phase_limit, Visitor&& visit) {
  T y = y0, p = p0;
  double exp2 = 0.0;
  const double lam_abs = abs_of(lambda);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const double x0 = grid.edges[c];
    if (c == grid.jump_cell) {
      if (x_stop < x0 || (x_stop == x0 && side == StopSide::Left)) break;
      p = p / jump.a1() + jump.a2() * y;
      y = jump.a1() * y;
    }
    if (x_stop <= x0) break;
    const double x1 = std::min(grid.edges[c + 1], x_stop);
    const double len = x1 - x0;
    const int m = kernels::substeps_for(lam_abs, grid.qmax, len, phase_limit);
    const double d = len / m;
    const T g = grid.qbar[c] - lambda;
    T cc, ss;
    cos_sinc(T(g * (d * d)), cc, ss);
    ss = ss * d;
    const T gs = g * ss;
    for (int j = 0; j < m; ++j) {
      visit(x0 + j * d, d, g, y, p, exp2 * std::numbers::ln2);
      const T y1 = cc * y + ss * p;
      const T p1 = gs * y + cc * p;
      const double mx = std::max(max_part(y1), max_part(p1));
      double k = 0.0;
      const double s = mx > 0.0 && std::isfinite(mx) ? renorm_scale(mx, k) : 1.0;
      y = y1 * s;
      p = p1 * s;
      exp2 += k;
    }
  }
  return {y, p, exp2 * std::numbers::ln2};
}

/// Joint walk of two problems on grids with identical edges, sharing the substep partition.
/// `visit(x0, d, g, y0, p0, gt, yt0, pt0, log_scale)`; log_scale is the combined scale of the
/// product y * yt. Both solutions start from (1, h) and (1, ht).
template <class T, class Visitor>
std::pair<WalkState<T>, WalkState<T>> walk_pair(const CellGrid& grid, const CellGrid& grid_t, double h, double ht,
                                                const Transmission& jump, const Transmission& jump_t,
                                                const T& lambda, double x_stop, double phase_limit,
                                                Visitor&& visit) {
  T y = T(1.0), p = T(h), yt = T(1.0), pt = T(ht);
  double e = 0.0, et = 0.0;
  const double lam_abs = abs_of(lambda);
  const double qmax = std::max(grid.qmax, grid_t.qmax);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const double x0 = grid.edges[c];
    if (x_stop <= x0) break;
    if (c == grid.jump_cell) {
      p = p / jump.a1() + jump.a2() * y;
      y = jump.a1() * y;
      pt = pt / jump_t.a1() + jump_t.a2() * yt;
      yt = jump_t.a1() * yt;
    }
    const double x1 = std::min(grid.edges[c + 1], x_stop);
    const double len = x1 - x0;
    const int m = kernels::substeps_for(lam_abs, qmax, len, phase_limit);
    const double d = len / m;
    const T g = grid.qbar[c] - lambda;
    const T gt = grid_t.qbar[c] - lambda;
    T cc, ss, cct, sst;
    cos_sinc(T(g * (d * d)), cc, ss);
    cos_sinc(T(gt * (d * d)), cct, sst);
    ss = ss * d;
    sst = sst * d;
    for (int j = 0; j < m; ++j) {
      visit(x0 + j * d, d, g, y, p, gt, yt, pt, (e + et) * std::numbers::ln2);
      const T y1 = cc * y + ss * p;
      const T p1 = g * ss * y + cc * p;
      const T yt1 = cct * yt + sst * pt;
      const T pt1 = gt * sst * yt + cct * pt;
      double k = 0.0, kt = 0.0;
      const double mx = std::max(max_part(y1), max_part(p1));
      const double mxt = std::max(max_part(yt1), max_part(pt1));
      const double s = mx > 0.0 && std::isfinite(mx) ? renorm_scale(mx, k) : 1.0;
      const double st = mxt > 0.0 && std::isfinite(mxt) ? renorm_scale(mxt, kt) : 1.0;
      y = y1 * s;
      p = p1 * s;
      yt = yt1 * st;
      pt = pt1 * st;
      e += k;
      et += kt;
    }
  }
  return {WalkState<T>{y, p, e * std::numbers::ln2}, WalkState<T>{yt, pt, et * std::numbers::ln2}};
}

struct NoVisit {
  template <class... A>
  void operator()(A&&...) const {}
};

}  // namespace discospec::detail
