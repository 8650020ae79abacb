#pragma once

#include <array>
#include <span>
#include <vector>

namespace discospec {

/// One cubic piece of a potential; coefficients act on the local coordinate x - x0.
struct Piece {
  double x0 = 0.0;
  double x1 = 1.0;
  std::array<double, 4> coeffs{};

  double eval(double x) const;
  /// Integral of the piece from x0 to x (x inside the piece).
  double primitive(double x) const;
  bool operator==(const Piece&) const = default;
};

/// Piecewise-cubic real potential on [0,1]. The point 1/2 is always a breakpoint:
/// a piece straddling it is split on construction.
class Potential {
 public:
  Potential();  // q == 0
  explicit Potential(std::vector<Piece> pieces);

  static Potential constant(double c);
  /// Global polynomial sum_j c_j x^j on [0,1].
  static Potential polynomial(std::span<const double> global_coeffs);
  /// Piecewise constant on the cells [edges[i], edges[i+1]]; edges must span [0,1].
  static Potential piecewise_constant(std::span<const double> edges, std::span<const double> values);
  /// Cell averages of `source` over the given edges, as a piecewise-constant potential.
  static Potential projected(const Potential& source, std::span<const double> edges);

  /// Replace the potential on [0,b] with a piecewise-constant head and keep this one on [b,1].
  Potential with_head(std::span<const double> head_edges, std::span<const double> head_values) const;

  double operator()(double x) const;
  double integrate(double x0, double x1) const;
  /// Upper bound of |q| (sum of absolute monomial contributions per piece).
  double sup_bound() const;
  /// L2 norm of (this - other) on [x0,x1], exact for the piecewise-polynomial difference.
  double l2_distance(const Potential& other, double x0, double x1) const;

  const std::vector<Piece>& pieces() const { return pieces_; }
  std::vector<double> breakpoints() const;

  bool operator==(const Potential&) const = default;

 private:
  std::vector<Piece> pieces_;
};

double eval_potential(const Potential& q, double x);
double integrate_potential(const Potential& q, double x0, double x1);

/// Re-expand a local cubic about a shifted origin: p(t) -> p(t + delta).
std::array<double, 4> shift_cubic(const std::array<double, 4>& c, double delta);

}  // namespace discospec
