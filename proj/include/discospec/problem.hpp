#pragma once

#include <array>
#include <complex>
#include <variant>
#include <vector>

#include "discospec/potential.hpp"

namespace discospec {

struct Robin {
  double coefficient = 0.0;
  bool operator==(const Robin&) const = default;
};
struct Dirichlet {
  bool operator==(const Dirichlet&) const = default;
};

/// Condition at x = 1: y'(1) + H y(1) = 0, or y(1) = 0.
using BoundaryCondition = std::variant<Robin, Dirichlet>;

inline bool is_dirichlet(const BoundaryCondition& bc) { return std::holds_alternative<Dirichlet>(bc); }

/// Jump at x = 1/2: y(+) = a1 y(-), y'(+) = y'(-)/a1 + a2 y(-).
class Transmission {
 public:
  Transmission() = default;
  Transmission(double a1, double a2);

  double a1() const { return a1_; }
  double a2() const { return a2_; }
  /// Row-major [[a1, 0], [a2, 1/a1]].
  std::array<double, 4> matrix() const { return {a1_, 0.0, a2_, 1.0 / a1_}; }

  bool operator==(const Transmission&) const = default;

 private:
  double a1_ = 1.0;
  double a2_ = 0.0;
};

/// The boundary value problem B(q, h, H, a1, a2), or B_inf when `right` is Dirichlet.
struct ProblemSpec {
  Potential q;
  double h = 0.0;
  BoundaryCondition right = Robin{0.0};
  Transmission jump;

  void validate() const;
  bool operator==(const ProblemSpec&) const = default;
};

/// Spectrum families distinguished by their leading asymptotics: n*pi versus gamma_n.
enum class Family { BType, BInfType };

inline Family family_of(const ProblemSpec& p) { return is_dirichlet(p.right) ? Family::BInfType : Family::BType; }

struct StateVector {
  std::complex<double> y;
  std::complex<double> dy;
  double x = 0.0;
};

struct SpectralValue {
  int n = 0;
  double lambda = 0.0;
  double residual_abs = 0.0;  // |characteristic(lambda)|
};

struct Spectrum {
  ProblemSpec problem;
  std::vector<SpectralValue> values;

  std::vector<double> lambdas() const;
  void validate() const;
};

struct PropagatorConfig {
  int cells_per_unit = 256;
  double refine_tol = 1e-12;
  int max_bisections = 200;

  void validate() const;
};

}  // namespace discospec
