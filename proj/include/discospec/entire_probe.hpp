#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "discospec/problem.hpp"
#include "discospec/scaled.hpp"

namespace discospec {

using ScaledFn = std::function<ScaledComplex(std::complex<double>)>;

struct ProbeGrid {
  std::vector<double> k_real;
  std::vector<double> t_imag;  // positive, increasing
  std::size_t n_factors = 100000;

  void validate() const;
};

/// g(k) = int_0^b (qt - q) y yt dx + (ht - h) + a1 (a2t - a2) y yt(1/2-), lambda = k^2.
/// q and qt must agree on [b,1] and the problems must share a1.
ScaledComplex g_integral_scaled(const ProblemSpec& b, const ProblemSpec& bt, double bpos, std::complex<double> k,
                                const PropagatorConfig& cfg = {});
std::complex<double> g_integral(const ProblemSpec& b, const ProblemSpec& bt, double bpos, std::complex<double> k,
                                const PropagatorConfig& cfg = {});

/// sin(z) and cos(z) as mantissa * exp(log_scale), safe for large |Im z|.
ScaledComplex scaled_sin(std::complex<double> z);
ScaledComplex scaled_cos(std::complex<double> z);

/// sigma1^-1 sqrt(lambda) sin(sigma1 sqrt(lambda)) [cos(sigma2 sqrt(lambda)) + a]; single-valued in lambda.
ScaledComplex phi0_scaled(std::complex<double> lambda, double sigma1, double sigma2, double a);
std::complex<double> phi0(std::complex<double> lambda, double sigma1, double sigma2, double a);

/// Zero sequence kappa_n, n >= 0: explicit values first, then the two-term continuation
/// ((lead_n + (shift + (-1)^n shift_alt) / (n pi)) / sigma)^2 with lead_n = n pi or gamma_n.
struct Lattice {
  std::vector<double> values;
  Family kind = Family::BType;
  double sigma = 1.0;
  double a = 0.0;
  double shift = 0.0;
  double shift_alt = 0.0;

  double at(std::size_t n) const;
  /// alpha_n = (n pi / sigma1)^2 and beta_n = (gamma_n / sigma2)^2.
  static Lattice alpha(double sigma1);
  static Lattice beta(double sigma2, double a);
  /// Computed eigenvalues continued by their two-term asymptotics.
  static Lattice from_spectrum(const Spectrum& spectrum);
};

struct ProductValue {
  ScaledComplex value;
  double rel_error = 0.0;  // rounding plus truncation bound, relative to |value|
};

/// prod over lattices and n < n_factors of (1 - lambda/kappa_n), a zero kappa contributing lambda,
/// times the first-order tail exp(-lambda sum_{n >= n_factors} 1/kappa_n).
ProductValue phi_product(std::span<const Lattice> lattices, std::complex<double> lambda, std::size_t n_factors);

struct DecaySample {
  double t = 0.0;
  double log_abs_e = 0.0;
  bool skipped = false;  // Phi(it) vanished or was not finite
};

struct DecayReport {
  std::vector<DecaySample> samples;
  double slope = 0.0;  // least squares of log|E| against log t over the kept samples
};

/// E(it) = G(it) / Phi(it).
DecayReport E_decay_probe(const ScaledFn& G, const ScaledFn& Phi, std::span<const double> t_samples);

struct GrowthEstimate {
  std::vector<double> theta;
  std::vector<double> h;               // directional type estimates, clipped at 0
  double indicator_integral = 0.0;     // (1/2pi) int h(theta) dtheta by the trapezoid rule
  std::vector<double> count_radii;
  std::vector<long> zeros_in_disk;     // argument principle on |k| = r
  std::vector<long> real_zeros;        // sign changes of Re g on (-r, r)
  std::vector<double> ratio;           // zeros_in_disk / r
};

/// `radii` drive the directional slopes (windowed maxima over [R - pi, R], fit over R <= r_fit_max);
/// `count_radii` the zero counts.
GrowthEstimate growth_scan(const ScaledFn& g, std::span<const double> radii, std::span<const double> theta,
                           std::span<const double> count_radii, double r_fit_max = 50.0);

/// sup over the k samples and cell edges x in [0,b] of |y yt| exp(-2 b |Im k|).
double product_bound_probe(const ProblemSpec& b, const ProblemSpec& bt, double bpos,
                           std::span<const std::complex<double>> k_samples, const PropagatorConfig& cfg = {});

/// min over t of |sin(sigma sqrt(it))| exp(-sigma |Im sqrt(it)|).
double sine_lower_bound(double sigma, std::span<const double> t_samples);

}  // namespace discospec
