#include "discospec/entire_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "discospec/asymptotics.hpp"
#include "discospec/detail/walker.hpp"
#include "discospec/errors.hpp"
#include "discospec/forward.hpp"
#include "discospec/kernels.hpp"

namespace discospec {

using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PairSetup {
  CellGrid grid;
  CellGrid grid_t;
  std::vector<double> dq;
};

PairSetup pair_setup(const ProblemSpec& b, const ProblemSpec& bt, double bpos, const PropagatorConfig& cfg) {
  b.validate();
  bt.validate();
  cfg.validate();
  check_same_a1(b, bt);
  if (!(bpos > 0.0 && bpos <= 1.0)) throw DomainError("b must lie in (0,1]");
  if (bpos < 1.0 && b.q.l2_distance(bt.q, bpos, 1.0) > 1e-10)
    throw ContractError("the potentials must agree on [b,1]");
  const double extra[] = {bpos};
  PairSetup s{build_pair_grid(b.q, bt.q, cfg.cells_per_unit, extra), {}, {}};
  s.grid_t = s.grid.with_potential(bt.q);
  s.dq.resize(s.grid.cells());
  for (std::size_t c = 0; c < s.grid.cells(); ++c)
    s.dq[c] = s.grid.edges[c] < bpos ? s.grid_t.qbar[c] - s.grid.qbar[c] : 0.0;
  return s;
}

std::size_t cell_of(const CellGrid& g, double x0, double d) {
  const auto it = std::upper_bound(g.edges.begin(), g.edges.end(), x0 + 0.5 * d);
  return static_cast<std::size_t>(it - g.edges.begin()) - 1;
}

// exp(i w) * exp(-s) for complex w with Im w >= -s, i.e. a bounded factor.
cplx bounded_exp_i(cplx w, double s) { return std::polar(std::exp(-w.imag() - s), w.real()); }

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

void ProbeGrid::validate() const {
  for (std::size_t i = 0; i < t_imag.size(); ++i) {
    if (!(t_imag[i] > 0.0)) throw DomainError("t samples must be positive");
    if (i > 0 && !(t_imag[i] > t_imag[i - 1])) throw DomainError("t samples must increase");
  }
  if (n_factors < 1000) throw DomainError("at least 1000 product factors are required");
}

ScaledComplex g_integral_scaled(const ProblemSpec& b, const ProblemSpec& bt, double bpos, cplx k,
                                const PropagatorConfig& cfg) {
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) throw DomainError("k must be finite");
  const PairSetup s = pair_setup(b, bt, bpos, cfg);
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  const cplx lambda = k * k;

  ScaledComplex sum;
  cplx half_y{}, half_yt{};
  double half_scale = 0.0;
  bool have_half = false;
  auto visit = [&](double x0, double d, cplx g, cplx y0, cplx p0, cplx gt, cplx yt0, cplx pt0, double scale) {
    if (bpos > 0.5 && !have_half && x0 == 0.5) {
      half_y = y0 / b.jump.a1();
      half_yt = yt0 / bt.jump.a1();
      half_scale = scale;
      have_half = true;
    }
    if (x0 >= bpos) return;
    const double dq = s.dq[cell_of(s.grid, x0, d)];
    if (dq == 0.0) return;
    cplx acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double t = 0.5 * d * (1.0 + sign * xs[i]);
        cplx y, p, yt, pt;
        detail::local_solution(g, t, y0, p0, y, p);
        detail::local_solution(gt, t, yt0, pt0, yt, pt);
        acc += ws[i] * y * yt;
      }
    }
    sum = sum + ScaledComplex{dq * 0.5 * d * acc, scale};
  };
  const double x_end = std::max(bpos, 0.5);
  const auto [w, wt] = detail::walk_pair<cplx>(s.grid, s.grid_t, b.h, bt.h, b.jump, bt.jump, lambda, x_end,
                                               kQuadPhase, visit);
  if (!have_half) {
    half_y = w.y;
    half_yt = wt.y;
    half_scale = w.log_scale + wt.log_scale;
  }
  const double jump_coef = b.jump.a1() * (bt.jump.a2() - b.jump.a2());
  sum = sum + ScaledComplex{jump_coef * half_y * half_yt, half_scale};
  sum = sum + ScaledComplex{cplx(bt.h - b.h), 0.0};
  return sum.normalized();
}

cplx g_integral(const ProblemSpec& b, const ProblemSpec& bt, double bpos, cplx k, const PropagatorConfig& cfg) {
  return g_integral_scaled(b, bt, bpos, k, cfg).value();
}

ScaledComplex scaled_sin(cplx z) {
  const double s = std::abs(z.imag());
  // (e^{iz} - e^{-iz}) / 2i with both exponentials scaled by e^{-s}.
  const cplx m = (bounded_exp_i(z, s) - bounded_exp_i(-z, s)) / cplx(0.0, 2.0);
  return ScaledComplex{m, s}.normalized();
}

ScaledComplex scaled_cos(cplx z) {
  const double s = std::abs(z.imag());
  return ScaledComplex{(bounded_exp_i(z, s) + bounded_exp_i(-z, s)) * 0.5, s}.normalized();
}

ScaledComplex phi0_scaled(cplx lambda, double sigma1, double sigma2, double a) {
  if (!(sigma1 > 0.0) || !(sigma2 >= 0.0)) throw DomainError("phi0 needs sigma1 > 0 and sigma2 >= 0");
  const cplx r = std::sqrt(lambda);
  // lambda * sin(sigma1 r) / (sigma1 r), with the series near r = 0.
  ScaledComplex first;
  const cplx z = sigma1 * r;
  if (std::abs(z) < 1e-3) {
    const cplx w = z * z;
    first = ScaledComplex{lambda * (1.0 - w / 6.0 + w * w / 120.0), 0.0};
  } else {
    const ScaledComplex sn = scaled_sin(z);
    first = ScaledComplex{sn.mantissa * lambda / z, sn.log_scale};
  }
  ScaledComplex second;
  if (sigma2 == 0.0) {
    second = ScaledComplex{cplx(1.0 + a), 0.0};
  } else {
    const ScaledComplex c = scaled_cos(sigma2 * r);
    second = c + ScaledComplex{cplx(a), 0.0};
  }
  return (first * second).normalized();
}

cplx phi0(cplx lambda, double sigma1, double sigma2, double a) { return phi0_scaled(lambda, sigma1, sigma2, a).value(); }

double Lattice::at(std::size_t n) const {
  if (n < values.size()) return values[n];
  const int i = static_cast<int>(n);
  double s = leading_sqrt(kind, a, i);
  if (i > 0) s += (shift + (i % 2 == 0 ? shift_alt : -shift_alt)) / (i * pi);
  s /= sigma;
  return s * s;
}

Lattice Lattice::alpha(double sigma1) {
  if (!(sigma1 > 0.0)) throw DomainError("sigma1 must be positive");
  Lattice l;
  l.sigma = sigma1;
  return l;
}

Lattice Lattice::beta(double sigma2, double a) {
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  if (!(std::abs(a) < 1.0)) throw DomainError("|a| must be below 1");
  Lattice l;
  l.kind = Family::BInfType;
  l.sigma = sigma2;
  l.a = a;
  return l;
}

Lattice Lattice::from_spectrum(const Spectrum& spectrum) {
  Lattice l;
  l.values = spectrum.lambdas();
  l.kind = family_of(spectrum.problem);
  const AsymptoticConstants c = constants(spectrum.problem);
  l.a = c.a;
  if (l.kind == Family::BType) {
    l.shift = c.omega.value_or(c.omega0);
    l.shift_alt = c.omega1.value_or(0.0);
  } else {
    l.shift = c.omega0;
  }
  return l;
}

ProductValue phi_product(std::span<const Lattice> lattices, cplx lambda, std::size_t n_factors) {
  if (n_factors < 2) throw DomainError("phi_product needs at least two factors per lattice");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double lam_abs = std::abs(lambda);
  const double n_big = static_cast<double>(n_factors);
  ScaledComplex value{cplx(1.0), 0.0};
  double rounding = 0.0;
  double tail_error = 0.0;
  cplx tail_exponent = 0.0;
  std::vector<double> kappa;
  kappa.reserve(n_factors);
  for (const Lattice& lat : lattices) {
    kappa.clear();
    int zeros = 0;
    for (std::size_t n = 0; n < n_factors; ++n) {
      const double k = lat.at(n);
      if (k == 0.0)
        ++zeros;
      else
        kappa.push_back(k);
    }
    const auto r = kernels::factor_product(kappa.data(), kappa.size(), lambda.real(), lambda.imag());
    value = value * ScaledComplex{cplx(r.re, r.im), r.exponent * std::numbers::ln2};
    rounding += r.weight;
    for (int z = 0; z < zeros; ++z) value = value * ScaledComplex{lambda, 0.0};

    // sum_{n >= N} 1/kappa_n from the leading lattice; the rest goes into the error bar.
    const double s2 = lat.sigma * lat.sigma;
    const double shifts = std::abs(lat.shift) + std::abs(lat.shift_alt);
    double t, t_err;
    if (lat.kind == Family::BType) {
      t = s2 / (pi * pi) * boost::math::trigamma(n_big);
      t_err = s2 * 2.0 * shifts / (3.0 * std::pow(pi, 4) * std::pow(n_big - 1.0, 3));
    } else {
      const double c = std::asin(lat.a);
      t = s2 / (pi * pi) * boost::math::trigamma(n_big + 0.5);
      t_err = s2 * (2.0 * std::abs(c) / (std::pow(pi, 3) * std::pow(n_big, 3)) +
                    (4.0 * c * c + 2.0 * shifts) / (std::pow(pi, 4) * std::pow(n_big - 1.0, 3)));
    }
    tail_exponent -= lambda * t;
    // Second-order remainder of log(1 - x) + x over the tail, plus the tail-sum approximation.
    const double second = lam_abs * lam_abs * s2 * s2 / (3.0 * std::pow(pi, 4) * std::pow(n_big - 1.0, 3));
    tail_error += second + lam_abs * t_err;
  }
  value = value * ScaledComplex{std::exp(cplx(0.0, tail_exponent.imag())), tail_exponent.real()};
  return {value.normalized(), eps * rounding + tail_error};
}

DecayReport E_decay_probe(const ScaledFn& G, const ScaledFn& Phi, std::span<const double> t_samples) {
  DecayReport rep;
  std::vector<double> lx, ly;
  for (double t : t_samples) {
    if (!(t > 0.0)) throw DomainError("t samples must be positive");
    const cplx lam(0.0, t);
    const ScaledComplex g = G(lam);
    const ScaledComplex f = Phi(lam);
    DecaySample s{t, kNegInf, false};
    const double lf = f.log_abs();
    if (!std::isfinite(lf)) {
      s.skipped = true;
    } else {
      s.log_abs_e = g.log_abs() - lf;
      if (std::isfinite(s.log_abs_e)) {
        lx.push_back(std::log(t));
        ly.push_back(s.log_abs_e);
      }
    }
    rep.samples.push_back(s);
  }
  rep.slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;
  return rep;
}

namespace {

double arg_of(const ScaledComplex& v) { return std::arg(v.mantissa); }

double wrap(double d) {
  while (d > pi) d -= 2 * pi;
  while (d <= -pi) d += 2 * pi;
  return d;
}

// Phase change of g along the arc from angle t0 to t1 on |k| = r, refined until each step is small.
double arc_phase(const ScaledFn& g, double r, double t0, double t1, double a0, double a1, int depth) {
  const double d = wrap(a1 - a0);
  if (std::abs(d) <= pi / 4 || depth >= 18) return d;
  const double tm = 0.5 * (t0 + t1);
  const double am = arg_of(g(std::polar(r, tm)));
  return arc_phase(g, r, t0, tm, a0, am, depth + 1) + arc_phase(g, r, tm, t1, am, a1, depth + 1);
}

long winding(const ScaledFn& g, double r) {
  const int m = std::max(64, static_cast<int>(std::ceil(8.0 * r)));
  std::vector<double> args(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i < m; ++i) args[i] = arg_of(g(std::polar(r, 2 * pi * i / m)));
  args[m] = args[0];
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += arc_phase(g, r, 2 * pi * i / m, 2 * pi * (i + 1) / m, args[i], args[i + 1], 0);
  return std::lround(total / (2 * pi));
}

}  // namespace

GrowthEstimate growth_scan(const ScaledFn& g, std::span<const double> radii, std::span<const double> theta,
                           std::span<const double> count_radii, double r_fit_max) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw DomainError("radii must increase");
  GrowthEstimate est;
  est.theta.assign(theta.begin(), theta.end());
  for (double th : theta) {
    std::vector<double> lg;
    lg.reserve(radii.size());
    for (double r : radii) lg.push_back(g(std::polar(r, th)).log_abs());
    std::vector<double> xs, ys;
    std::size_t lo = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      while (radii[lo] < radii[i] - pi) ++lo;
      if (radii[i] < radii.front() + pi || radii[i] > r_fit_max) continue;
      const double w = *std::max_element(lg.begin() + static_cast<long>(lo), lg.begin() + static_cast<long>(i) + 1);
      if (!std::isfinite(w)) continue;
      xs.push_back(radii[i]);
      ys.push_back(w);
    }
    est.h.push_back(xs.size() >= 2 ? std::max(0.0, least_squares_slope(xs, ys)) : 0.0);
  }
  // Trapezoid over the periodic theta grid.
  if (theta.size() >= 2) {
    double integral = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const std::size_t j = (i + 1) % theta.size();
      double dt = theta[j] - theta[i];
      if (j == 0) dt += 2 * pi;
      integral += 0.5 * (est.h[i] + est.h[j]) * dt;
    }
    est.indicator_integral = integral / (2 * pi);
  }
  if (!count_radii.empty()) {
    const double r_max = *std::max_element(count_radii.begin(), count_radii.end());
    const int m = std::max(2, static_cast<int>(std::ceil(2.0 * r_max / 0.02)));
    std::vector<double> xs(static_cast<std::size_t>(m) + 1), re(xs.size());
    for (int i = 0; i <= m; ++i) {
      xs[i] = -r_max + 2.0 * r_max * i / m;
      re[i] = g(cplx(xs[i], 0.0)).mantissa.real();
    }
    for (double r : count_radii) {
      long changes = 0;
      for (int i = 0; i < m; ++i)
        if (std::abs(xs[i]) < r && std::abs(xs[i + 1]) < r && re[i] != 0.0 &&
            (re[i + 1] == 0.0 || std::signbit(re[i]) != std::signbit(re[i + 1])))
          ++changes;
      const long inside = winding(g, r);
      est.count_radii.push_back(r);
      est.zeros_in_disk.push_back(inside);
      est.real_zeros.push_back(changes);
      est.ratio.push_back(static_cast<double>(inside) / r);
    }
  }
  return est;
}

double product_bound_probe(const ProblemSpec& b, const ProblemSpec& bt, double bpos, std::span<const cplx> k_samples,
                           const PropagatorConfig& cfg) {
  const PairSetup s = pair_setup(b, bt, bpos, cfg);
  double best = kNegInf;
  for (cplx k : k_samples) {
    const double damp = 2.0 * bpos * std::abs(k.imag());
    auto visit = [&](double x0, double, cplx, cplx y0, cplx, cplx, cplx yt0, cplx, double scale) {
      if (x0 > bpos) return;
      const double v = std::abs(y0 * yt0);
      if (v > 0.0) best = std::max(best, std::log(v) + scale - damp);
    };
    const auto [w, wt] = detail::walk_pair<cplx>(s.grid, s.grid_t, b.h, bt.h, b.jump, bt.jump, k * k, bpos,
                                                 kQuadPhase, visit);
    const double v = std::abs(w.y * wt.y);
    if (v > 0.0) best = std::max(best, std::log(v) + w.log_scale + wt.log_scale - damp);
  }
  return std::exp(best);
}

double sine_lower_bound(double sigma, std::span<const double> t_samples) {
  double low = INFINITY;
  for (double t : t_samples) {
    const cplx r = std::sqrt(cplx(0.0, t));
    const ScaledComplex s = scaled_sin(sigma * r);
    low = std::min(low, std::exp(s.log_abs() - sigma * std::abs(r.imag())));
  }
  return low;
}

}  // namespace discospec
