#include "discospec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "discospec/errors.hpp"

namespace discospec {

namespace {

constexpr double kJump = 0.5;

// Four-point Gauss-Legendre on [-1,1]; exact for degree 7.
constexpr std::array<double, 4> kGaussX{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                        0.8611363115940526};
constexpr std::array<double, 4> kGaussW{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                        0.3478548451374538};

std::vector<Piece> split_at(std::vector<Piece> pieces, double s) {
  std::vector<Piece> out;
  out.reserve(pieces.size() + 1);
  for (const auto& p : pieces) {
    if (p.x0 < s && s < p.x1) {
      Piece left = p;
      left.x1 = s;
      Piece right = p;
      right.x0 = s;
      right.coeffs = shift_cubic(p.coeffs, s - p.x0);
      out.push_back(left);
      out.push_back(right);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::array<double, 4> shift_cubic(const std::array<double, 4>& c, double delta) {
  // c'_k = sum_{j>=k} c_j binom(j,k) delta^(j-k)
  std::array<double, 4> r{};
  constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  for (int k = 0; k < 4; ++k) {
    double acc = 0.0;
    for (int j = 3; j >= k; --j) acc = acc * delta + c[j] * binom[j][k];
    r[k] = acc;
  }
  return r;
}

double Piece::eval(double x) const {
  const double t = x - x0;
  return ((coeffs[3] * t + coeffs[2]) * t + coeffs[1]) * t + coeffs[0];
}

double Piece::primitive(double x) const {
  const double t = x - x0;
  return (((coeffs[3] / 4.0 * t + coeffs[2] / 3.0) * t + coeffs[1] / 2.0) * t + coeffs[0]) * t;
}

Potential::Potential() : Potential(std::vector<Piece>{Piece{0.0, 1.0, {0.0, 0.0, 0.0, 0.0}}}) {}

Potential::Potential(std::vector<Piece> pieces) {
  if (pieces.empty()) throw DomainError("potential needs at least one piece");
  for (const auto& p : pieces) {
    if (!(p.x0 < p.x1)) throw DomainError("potential piece has empty or reversed interval");
    for (double c : p.coeffs) {
      if (!std::isfinite(c)) throw DomainError("potential coefficient is not finite");
    }
  }
  if (pieces.front().x0 != 0.0 || pieces.back().x1 != 1.0)
    throw DomainError("potential pieces must cover [0,1]");
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (pieces[i].x0 != pieces[i - 1].x1)
      throw DomainError("potential pieces must be contiguous (gap or overlap at x=" +
                        std::to_string(pieces[i - 1].x1) + ")");
  }
  pieces_ = split_at(std::move(pieces), kJump);
}

Potential Potential::constant(double c) { return Potential({Piece{0.0, 1.0, {c, 0.0, 0.0, 0.0}}}); }

Potential Potential::polynomial(std::span<const double> global_coeffs) {
  if (global_coeffs.size() > 4) throw DomainError("potential polynomials are limited to degree 3");
  std::array<double, 4> c{};
  std::copy(global_coeffs.begin(), global_coeffs.end(), c.begin());
  return Potential({Piece{0.0, 1.0, c}});
}

Potential Potential::piecewise_constant(std::span<const double> edges, std::span<const double> values) {
  if (edges.size() != values.size() + 1) throw DomainError("piecewise_constant: edges/values size mismatch");
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < values.size(); ++i) pieces.push_back(Piece{edges[i], edges[i + 1], {values[i], 0, 0, 0}});
  return Potential(std::move(pieces));
}

Potential Potential::projected(const Potential& source, std::span<const double> edges) {
  std::vector<double> values;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    values.push_back(source.integrate(edges[i], edges[i + 1]) / (edges[i + 1] - edges[i]));
  return piecewise_constant(edges, values);
}

Potential Potential::with_head(std::span<const double> head_edges, std::span<const double> head_values) const {
  if (head_edges.size() != head_values.size() + 1 || head_edges.front() != 0.0)
    throw DomainError("with_head: head must start at 0 and have one value per cell");
  const double b = head_edges.back();
  std::vector<Piece> out;
  for (std::size_t i = 0; i < head_values.size(); ++i)
    out.push_back(Piece{head_edges[i], head_edges[i + 1], {head_values[i], 0, 0, 0}});
  if (b < 1.0) {
    for (const auto& p : split_at(pieces_, b)) {
      if (p.x0 >= b) out.push_back(p);
    }
  }
  return Potential(std::move(out));
}

double Potential::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("eval_potential: x outside [0,1]");
  // Piece i owns (x0, x1]; the first piece also owns 0.
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x, [](const Piece& p, double v) { return p.x1 < v; });
  if (it == pieces_.end()) it = std::prev(pieces_.end());
  return it->eval(x);
}

double Potential::integrate(double x0, double x1) const {
  if (!(x0 >= 0.0 && x1 <= 1.0 && x0 <= x1)) throw DomainError("integrate_potential: need 0 <= x0 <= x1 <= 1");
  double acc = 0.0;
  for (const auto& p : pieces_) {
    const double lo = std::max(x0, p.x0);
    const double hi = std::min(x1, p.x1);
    if (lo < hi) acc += p.primitive(hi) - p.primitive(lo);
  }
  return acc;
}

double Potential::sup_bound() const {
  double m = 0.0;
  for (const auto& p : pieces_) {
    const double len = p.x1 - p.x0;
    double s = 0.0, pw = 1.0;
    for (double c : p.coeffs) {
      s += std::abs(c) * pw;
      pw *= len;
    }
    m = std::max(m, s);
  }
  return m;
}

double Potential::l2_distance(const Potential& other, double x0, double x1) const {
  std::vector<double> br = breakpoints();
  const auto ob = other.breakpoints();
  br.insert(br.end(), ob.begin(), ob.end());
  br.push_back(x0);
  br.push_back(x1);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double lo = br[i], hi = br[i + 1];
    if (lo < x0 || hi > x1) continue;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int g = 0; g < 4; ++g) {
      // interior nodes never sit on a breakpoint, so either side's convention is irrelevant
      const double x = mid + half * kGaussX[g];
      const double d = (*this)(x) - other(x);
      acc += kGaussW[g] * half * d * d;
    }
  }
  return std::sqrt(acc);
}

std::vector<double> Potential::breakpoints() const {
  std::vector<double> b;
  b.reserve(pieces_.size() + 1);
  for (const auto& p : pieces_) b.push_back(p.x0);
  b.push_back(1.0);
  return b;
}

double eval_potential(const Potential& q, double x) { return q(x); }

double integrate_potential(const Potential& q, double x0, double x1) { return q.integrate(x0, x1); }

}  // namespace discospec
