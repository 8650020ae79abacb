#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace discospec {

/// Complex number stored as mantissa * exp(log_scale); keeps products of exponentially
/// large solutions representable.
struct ScaledComplex {
  std::complex<double> mantissa{0.0, 0.0};
  double log_scale = 0.0;

  ScaledComplex() = default;
  ScaledComplex(std::complex<double> m, double l = 0.0) : mantissa(m), log_scale(l) {}

  /// May overflow to infinity; use log_abs() for large values.
  std::complex<double> value() const { return mantissa * std::exp(log_scale); }
  double log_abs() const {
    const double a = std::abs(mantissa);
    return a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a) + log_scale;
  }
  bool is_zero() const { return mantissa == std::complex<double>(0.0, 0.0); }

  ScaledComplex normalized() const {
    const double a = std::max(std::abs(mantissa.real()), std::abs(mantissa.imag()));
    if (a == 0.0 || !std::isfinite(a)) return *this;
    int e;
    std::frexp(a, &e);
    return {std::ldexp(mantissa.real(), -e) + std::complex<double>(0.0, std::ldexp(mantissa.imag(), -e)),
            log_scale + e * std::numbers::ln2};
  }
};

inline ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
  return ScaledComplex{a.mantissa * b.mantissa, a.log_scale + b.log_scale}.normalized();
}

inline ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double l = std::max(a.log_scale, b.log_scale);
  return ScaledComplex{a.mantissa * std::exp(a.log_scale - l) + b.mantissa * std::exp(b.log_scale - l), l}
      .normalized();
}

inline ScaledComplex operator-(const ScaledComplex& a) { return {-a.mantissa, a.log_scale}; }
inline ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) { return a + (-b); }

}  // namespace discospec
