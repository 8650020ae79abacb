#include "discospec/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "discospec/asymptotics.hpp"
#include "discospec/detail/walker.hpp"
#include "discospec/errors.hpp"
#include "discospec/kernels.hpp"
#include "discospec/parallel.hpp"

namespace discospec {

using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

void check_lambda(cplx lambda) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) throw DomainError("lambda must be finite");
}

CellGrid grid_for(const ProblemSpec& problem, const PropagatorConfig& cfg, double x_stop) {
  cfg.validate();
  if (!(x_stop >= 0.0 && x_stop <= 1.0)) throw DomainError("x_stop must lie in [0,1]");
  if (x_stop > 0.0 && x_stop < 1.0) {
    const double extra[] = {x_stop};
    return CellGrid::build(problem.q, cfg.cells_per_unit, extra);
  }
  return CellGrid::build(problem.q, cfg.cells_per_unit);
}

double right_theta(const BoundaryCondition& bc) {
  if (const auto* r = std::get_if<Robin>(&bc)) return std::atan2(1.0, -r->coefficient);
  return pi;
}

// Delta(lambda) as mantissa * 2^exponent; comparisons and secant ratios avoid overflow.
struct Val {
  double m = 0.0;
  double e = 0.0;
  double log2_abs() const { return m == 0.0 ? -std::numeric_limits<double>::infinity() : std::log2(std::abs(m)) + e; }
};

double ratio(const Val& num, const Val& den) { return num.m / den.m * std::exp2(num.e - den.e); }

double signed_square(double s) { return s >= 0.0 ? s * s : -s * s; }

}  // namespace

StateVector ScaledState::value() const {
  const double f = std::exp(log_scale);
  return {state.y * f, state.dy * f, state.x};
}

ScaledState propagate(const ProblemSpec& problem, cplx lambda, const PropagatorConfig& cfg, double x_stop,
                      JumpSide side) {
  check_lambda(lambda);
  problem.validate();
  const CellGrid grid = grid_for(problem, cfg, x_stop);
  const auto w = detail::walk<cplx>(grid, cplx(1.0), cplx(problem.h), problem.jump, lambda, x_stop,
                                    side == JumpSide::Left ? detail::StopSide::Left : detail::StopSide::Right,
                                    kCountPhase, detail::NoVisit{});
  return {{w.y, w.p, x_stop}, w.log_scale};
}

std::array<cplx, 4> transfer_matrix(const ProblemSpec& problem, cplx lambda, const PropagatorConfig& cfg,
                                    double x_stop) {
  check_lambda(lambda);
  problem.validate();
  const CellGrid grid = grid_for(problem, cfg, x_stop);
  const auto c1 = detail::walk<cplx>(grid, cplx(1.0), cplx(0.0), problem.jump, lambda, x_stop,
                                     detail::StopSide::Right, kCountPhase, detail::NoVisit{});
  const auto c2 = detail::walk<cplx>(grid, cplx(0.0), cplx(1.0), problem.jump, lambda, x_stop,
                                     detail::StopSide::Right, kCountPhase, detail::NoVisit{});
  const double f1 = std::exp(c1.log_scale), f2 = std::exp(c2.log_scale);
  return {c1.y * f1, c2.y * f2, c1.p * f1, c2.p * f2};
}

ScaledComplex characteristic_scaled(const ProblemSpec& problem, cplx lambda, const PropagatorConfig& cfg) {
  const ScaledState s = propagate(problem, lambda, cfg, 1.0);
  if (const auto* r = std::get_if<Robin>(&problem.right))
    return ScaledComplex{s.state.dy + r->coefficient * s.state.y, s.log_scale}.normalized();
  return ScaledComplex{s.state.y, s.log_scale}.normalized();
}

cplx characteristic(const ProblemSpec& problem, cplx lambda, const PropagatorConfig& cfg) {
  return characteristic_scaled(problem, lambda, cfg).value();
}

RealEvaluator::RealEvaluator(const ProblemSpec& problem, const PropagatorConfig& cfg)
    : RealEvaluator(problem, (cfg.validate(), CellGrid::build(problem.q, cfg.cells_per_unit))) {}

RealEvaluator::RealEvaluator(const ProblemSpec& problem, CellGrid grid)
    : problem_(problem), grid_(std::move(grid)), theta_b_(right_theta(problem.right)) {
  problem_.validate();
}

std::vector<RealEvaluator::Sample> RealEvaluator::evaluate(std::span<const double> lambdas) const {
  constexpr int L = kernels::kLanes;
  const kernels::PropagationInput in{grid_.width.data(), grid_.qbar.data(), grid_.cells(), grid_.jump_cell,
                                     problem_.h,         problem_.jump.a1(), problem_.jump.a2()};
  const double mw = grid_.max_width();
  const auto* robin = std::get_if<Robin>(&problem_.right);
  std::vector<Sample> out(lambdas.size());
  const std::size_t chunks = (lambdas.size() + L - 1) / L;
  parallel_for(chunks, [&](std::size_t ch) {
    double lam[L];
    int subs[L];
    kernels::LaneState st[L];
    const std::size_t base = ch * L;
    for (int l = 0; l < L; ++l) {
      const std::size_t i = std::min(base + l, lambdas.size() - 1);
      lam[l] = lambdas[i];
      if (!std::isfinite(lam[l])) throw DomainError("lambda must be finite");
      subs[l] = kernels::substeps_for(std::abs(lam[l]), grid_.qmax, mw, kCountPhase);
    }
    kernels::propagate_lanes(in, lam, subs, st);
    for (int l = 0; l < L && base + l < lambdas.size(); ++l) {
      Sample& s = out[base + l];
      s.delta_mantissa = robin ? st[l].dy + robin->coefficient * st[l].y : st[l].y;
      s.delta_exponent = st[l].exponent;
      double phi = std::atan2(st[l].y, st[l].dy);
      if (phi < 0.0) phi += pi;
      // atan2 rounds to pi when 0 < y << |dy|; only an exact zero of y was counted as a crossing.
      if (phi >= pi) phi = st[l].y == 0.0 ? 0.0 : std::nextafter(pi, 0.0);
      s.theta = st[l].zeros * pi + phi;
      const double x = (s.theta - theta_b_) / pi;
      s.count = x <= 0.0 ? 0 : static_cast<long>(std::ceil(x));
    }
  });
  return out;
}

RealEvaluator::Sample RealEvaluator::evaluate(double lambda) const {
  const double l[] = {lambda};
  return evaluate(std::span<const double>(l, 1))[0];
}

long count_below(const ProblemSpec& problem, double lambda, const PropagatorConfig& cfg) {
  return RealEvaluator(problem, cfg).evaluate(lambda).count;
}

namespace {

struct Job {
  int n = 0;
  double lo = 0.0, hi = 0.0;
  long clo = 0, chi = 0;
  Val flo, fhi;          // values used by the secant (Illinois-damped)
  Val tlo, thi;          // true values at the bracket ends
  int moved = 0;         // +1 lo moved last, -1 hi moved last
  int since_check = 0;
  double width_mark = 0.0;
  bool bisect = false;
  bool done = false;
  double root = 0.0;
  double residual = 0.0;
};

// Evaluate all requested points for the jobs selected by `pick`, then hand each sample back.
template <class Pick, class Apply>
void batch(const RealEvaluator& ev, std::vector<Job>& jobs, Pick&& pick, Apply&& apply) {
  std::vector<double> pts;
  std::vector<std::size_t> owner;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    double x;
    if (pick(jobs[j], x)) {
      pts.push_back(x);
      owner.push_back(j);
    }
  }
  if (pts.empty()) return;
  const auto s = ev.evaluate(pts);
  for (std::size_t i = 0; i < pts.size(); ++i) apply(jobs[owner[i]], pts[i], s[i]);
}

double floor_bound(const RealEvaluator& ev) {
  const ProblemSpec& p = ev.problem();
  double H = 0.0;
  if (const auto* r = std::get_if<Robin>(&p.right)) H = std::abs(r->coefficient);
  double l0 = -std::max(1.0, 4.0 * p.q.sup_bound() + 4.0 * std::abs(p.h) + 4.0 * H);
  // A large Robin coefficient at 0 produces an eigenvalue near -h^2; keep lowering until none lie below.
  for (int i = 0; i < 64; ++i) {
    if (ev.evaluate(l0).count == 0) return l0;
    l0 *= 4.0;
  }
  throw NumericalFailure("no spectral floor found");
}

}  // namespace

std::vector<SpectralValue> eigenvalues_at(const RealEvaluator& ev, std::span<const int> indices, double refine_tol,
                                          int max_iterations) {
  if (indices.empty()) return {};
  for (int n : indices)
    if (n < 0) throw DomainError("eigenvalue index must be non-negative");
  const ProblemSpec& problem = ev.problem();
  const Family fam = family_of(problem);
  const AsymptoticConstants c = constants(problem);
  const double l0 = floor_bound(ev);

  std::vector<Job> jobs(indices.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    Job& jb = jobs[j];
    jb.n = indices[j];
    const double s = predict_sqrt(fam, c, jb.n);
    jb.lo = std::max(l0, signed_square(s - pi / 2));
    jb.hi = std::max(jb.lo + 1.0, signed_square(s + pi / 2));
  }
  auto set_lo = [](Job& jb, double x, const RealEvaluator::Sample& s) {
    jb.lo = x;
    jb.clo = s.count;
  };
  auto set_hi = [](Job& jb, double x, const RealEvaluator::Sample& s) {
    jb.hi = x;
    jb.chi = s.count;
  };
  batch(ev, jobs, [](Job& jb, double& x) { return x = jb.lo, true; }, set_lo);
  batch(ev, jobs, [](Job& jb, double& x) { return x = jb.hi, true; }, set_hi);

  // Widen seed brackets until count(lo) <= n < count(hi).
  for (int it = 0;; ++it) {
    bool again = false;
    batch(
        ev, jobs,
        [&](Job& jb, double& x) {
          if (jb.clo <= jb.n) return false;
          jb.hi = jb.lo;
          jb.chi = jb.clo;
          const double s = signed_sqrt(jb.lo) - pi * static_cast<double>(jb.clo - jb.n + 1);
          x = std::max(l0, signed_square(s));
          return again = true;
        },
        set_lo);
    batch(
        ev, jobs,
        [&](Job& jb, double& x) {
          if (jb.chi > jb.n) return false;
          jb.lo = jb.hi;
          jb.clo = jb.chi;
          const double s = signed_sqrt(jb.hi) + pi * static_cast<double>(jb.n - jb.chi + 1);
          x = std::max(jb.hi + 1.0, signed_square(s));
          return again = true;
        },
        set_hi);
    if (!again) break;
    if (it > 200) throw IncompleteSpectrum("eigenvalue bracket search did not terminate", l0, jobs.back().hi);
  }

  // Bisect on the Pruefer count until exactly one eigenvalue lies in [lo, hi).
  for (int it = 0;; ++it) {
    bool again = false;
    batch(
        ev, jobs,
        [&](Job& jb, double& x) {
          if (jb.clo == jb.n && jb.chi == jb.n + 1) return false;
          x = jb.lo + 0.5 * (jb.hi - jb.lo);
          if (!(x > jb.lo && x < jb.hi))
            throw IncompleteSpectrum("eigenvalue " + std::to_string(jb.n) + " is not simple", jb.lo, jb.hi);
          return again = true;
        },
        [&](Job& jb, double x, const RealEvaluator::Sample& s) {
          if (s.count <= jb.n)
            set_lo(jb, x, s);
          else
            set_hi(jb, x, s);
        });
    if (!again) break;
    if (it > max_iterations + 1100) throw IncompleteSpectrum("count bisection did not isolate", l0, jobs.back().hi);
  }

  auto to_val = [](const RealEvaluator::Sample& s) { return Val{s.delta_mantissa, s.delta_exponent}; };
  batch(ev, jobs, [](Job& jb, double& x) { return x = jb.lo, true; },
        [&](Job& jb, double, const RealEvaluator::Sample& s) { jb.flo = jb.tlo = to_val(s); });
  batch(ev, jobs, [](Job& jb, double& x) { return x = jb.hi, true; },
        [&](Job& jb, double, const RealEvaluator::Sample& s) { jb.fhi = jb.thi = to_val(s); });

  // A root sitting on a bracket end can leave both computed values with one sign: widen slightly.
  for (Job& jb : jobs) {
    if (jb.flo.m == 0.0) {
      jb.done = true;
      jb.root = jb.lo;
    }
  }
  batch(
      ev, jobs,
      [](Job& jb, double& x) {
        if (jb.done || std::signbit(jb.flo.m) != std::signbit(jb.fhi.m) || jb.fhi.m == 0.0) return false;
        x = jb.lo - 1e-6 * (1.0 + std::abs(jb.lo));
        return true;
      },
      [&](Job& jb, double x, const RealEvaluator::Sample& s) {
        jb.lo = x;
        jb.flo = jb.tlo = to_val(s);
      });
  batch(
      ev, jobs,
      [](Job& jb, double& x) {
        if (jb.done || std::signbit(jb.flo.m) != std::signbit(jb.fhi.m) || jb.fhi.m == 0.0) return false;
        x = jb.hi + 1e-6 * (1.0 + std::abs(jb.hi));
        return true;
      },
      [&](Job& jb, double x, const RealEvaluator::Sample& s) {
        jb.hi = x;
        jb.fhi = jb.thi = to_val(s);
      });
  for (Job& jb : jobs) {
    if (jb.done) continue;
    if (jb.fhi.m == 0.0) {
      jb.done = true;
      jb.root = jb.hi;
    } else if (std::signbit(jb.flo.m) == std::signbit(jb.fhi.m)) {
      throw IncompleteSpectrum("no sign change around eigenvalue " + std::to_string(jb.n), jb.lo, jb.hi);
    }
    jb.width_mark = jb.hi - jb.lo;
  }

  // Safeguarded Illinois iteration, all brackets in lock step.
  auto tol_of = [](const Job& jb) {
    return 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::max(std::abs(jb.lo), std::abs(jb.hi)));
  };
  for (int it = 0;; ++it) {
    bool again = false;
    batch(
        ev, jobs,
        [&](Job& jb, double& x) {
          if (jb.done) return false;
          const double tol = tol_of(jb);
          if (jb.hi - jb.lo <= tol) {
            jb.done = true;
            const bool lo_better = jb.tlo.log2_abs() <= jb.thi.log2_abs();
            jb.root = lo_better ? jb.lo : jb.hi;
            return false;
          }
          if (jb.bisect) {
            x = jb.lo + 0.5 * (jb.hi - jb.lo);
          } else {
            const double r = ratio(jb.fhi, jb.flo);
            x = jb.lo + (jb.hi - jb.lo) / (1.0 - r);
          }
          if (!(x > jb.lo && x < jb.hi)) x = jb.lo + 0.5 * (jb.hi - jb.lo);
          x = std::clamp(x, jb.lo + 0.5 * tol, jb.hi - 0.5 * tol);
          return again = true;
        },
        [&](Job& jb, double x, const RealEvaluator::Sample& s) {
          const Val fx = to_val(s);
          if (fx.m == 0.0) {
            jb.done = true;
            jb.root = jb.lo = jb.hi = x;
            return;
          }
          if (std::signbit(fx.m) == std::signbit(jb.flo.m)) {
            jb.lo = x;
            jb.flo = jb.tlo = fx;
            if (jb.moved == 1) jb.fhi.e -= 1.0;
            jb.moved = 1;
          } else {
            jb.hi = x;
            jb.fhi = jb.thi = fx;
            if (jb.moved == -1) jb.flo.e -= 1.0;
            jb.moved = -1;
          }
          jb.bisect = false;
          if (++jb.since_check == 3) {
            const double w = jb.hi - jb.lo;
            jb.bisect = w > 0.5 * jb.width_mark;
            jb.width_mark = w;
            jb.since_check = 0;
          }
        });
    if (!again) break;
    if (it >= max_iterations) throw NumericalFailure("eigenvalue refinement did not converge");
  }

  std::vector<SpectralValue> out;
  out.reserve(jobs.size());
  std::vector<double> roots;
  for (const Job& jb : jobs) roots.push_back(jb.root);
  const auto fs = ev.evaluate(roots);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& jb = jobs[j];
    if (jb.hi - jb.lo > refine_tol * (1.0 + std::abs(jb.root)) && jb.root != jb.lo && jb.root != jb.hi)
      throw NumericalFailure("eigenvalue " + std::to_string(jb.n) + " not resolved to tolerance");
    out.push_back({jb.n, jb.root, std::abs(std::ldexp(fs[j].delta_mantissa, static_cast<int>(fs[j].delta_exponent)))});
  }
  // Distinct indices must give strictly ordered values.
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out[a].n < out[b].n; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = out[order[i - 1]];
    const auto& b = out[order[i]];
    if (a.n != b.n && !(a.lambda < b.lambda))
      throw IncompleteSpectrum("eigenvalues out of order near index " + std::to_string(b.n), a.lambda, b.lambda);
  }
  return out;
}

std::vector<SpectralValue> eigenvalues_at(const ProblemSpec& problem, std::span<const int> indices,
                                          const PropagatorConfig& cfg) {
  const RealEvaluator ev(problem, cfg);
  return eigenvalues_at(ev, indices, cfg.refine_tol, cfg.max_bisections);
}

Spectrum eigenvalues(const ProblemSpec& problem, int n_max, const PropagatorConfig& cfg) {
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  std::vector<int> idx(static_cast<std::size_t>(n_max) + 1);
  for (int i = 0; i <= n_max; ++i) idx[i] = i;
  Spectrum s{problem, eigenvalues_at(problem, idx, cfg)};
  s.validate();
  return s;
}

void check_same_a1(const ProblemSpec& b, const ProblemSpec& bt) {
  const double a = b.jump.a1(), at = bt.jump.a1();
  if (std::abs(a - at) > 1e-14 * std::max(std::abs(a), std::abs(at)))
    throw ContractError("the two problems must share a1");
}

ScaledComplex g_wronskian_scaled(const ProblemSpec& b, const ProblemSpec& bt, cplx k, const PropagatorConfig& cfg,
                                 double x_eval) {
  check_lambda(k);
  check_same_a1(b, bt);
  b.validate();
  bt.validate();
  cfg.validate();
  if (!(x_eval >= 0.5 && x_eval <= 1.0)) throw DomainError("Wronskian evaluation point must lie in [1/2, 1]");
  std::vector<double> extra;
  if (x_eval < 1.0) extra.push_back(x_eval);
  const CellGrid grid = build_pair_grid(b.q, bt.q, cfg.cells_per_unit, extra);
  const CellGrid grid_t = grid.with_potential(bt.q);
  const cplx lambda = k * k;
  const auto w = detail::walk<cplx>(grid, cplx(1.0), cplx(b.h), b.jump, lambda, x_eval, detail::StopSide::Right,
                                    kCountPhase, detail::NoVisit{});
  const auto wt = detail::walk<cplx>(grid_t, cplx(1.0), cplx(bt.h), bt.jump, lambda, x_eval,
                                     detail::StopSide::Right, kCountPhase, detail::NoVisit{});
  return ScaledComplex{wt.p * w.y - wt.y * w.p, w.log_scale + wt.log_scale}.normalized();
}

cplx g_wronskian(const ProblemSpec& b, const ProblemSpec& bt, cplx k, const PropagatorConfig& cfg) {
  return g_wronskian_scaled(b, bt, k, cfg).value();
}

EigenfunctionMoments eigenfunction_moments(const ProblemSpec& problem, double lambda, std::span<const double> edges,
                                           const PropagatorConfig& cfg) {
  check_lambda(lambda);
  problem.validate();
  cfg.validate();
  if (edges.size() < 2) throw DomainError("moments need at least one cell");
  const CellGrid grid = CellGrid::build(problem.q, cfg.cells_per_unit, edges);
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  EigenfunctionMoments m;
  m.cell_integrals.assign(edges.size() - 1, 0.0);
  auto visit = [&](double x0, double d, double g, double y0, double p0, double log_scale) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double nodes[2] = {0.5 * d * (1.0 - xs[i]), 0.5 * d * (1.0 + xs[i])};
      const int count = xs[i] == 0.0 ? 1 : 2;
      for (int s = 0; s < count; ++s) {
        double y, p;
        detail::local_solution(g, nodes[s], y0, p0, y, p);
        acc += ws[i] * y * y;
      }
    }
    const double v = 0.5 * d * acc * std::exp(2.0 * log_scale);
    m.norm2 += v;
    const double mid = x0 + 0.5 * d;
    const auto it = std::upper_bound(edges.begin(), edges.end(), mid);
    if (it != edges.begin() && it != edges.end()) m.cell_integrals[static_cast<std::size_t>(it - edges.begin()) - 1] += v;
  };
  const auto end = detail::walk<double>(grid, 1.0, problem.h, problem.jump, lambda, 1.0, detail::StopSide::Right,
                                        kQuadPhase, visit);
  m.y1 = end.y * std::exp(end.log_scale);
  const auto half = detail::walk<double>(grid, 1.0, problem.h, problem.jump, lambda, 0.5, detail::StopSide::Left,
                                         kQuadPhase, detail::NoVisit{});
  m.y_half_left = half.y * std::exp(half.log_scale);
  return m;
}

}  // namespace discospec
