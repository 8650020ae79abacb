#include "discospec/grid.hpp"

#include <algorithm>
#include <cmath>

#include "discospec/errors.hpp"

namespace discospec {

namespace {

std::vector<double> merged_edges(int cells_per_unit, std::span<const double> a, std::span<const double> b,
                                 std::span<const double> c) {
  if (cells_per_unit < 1) throw DomainError("cells_per_unit must be positive");
  std::vector<double> e;
  e.reserve(static_cast<std::size_t>(cells_per_unit) + a.size() + b.size() + c.size() + 2);
  for (int k = 0; k <= cells_per_unit; ++k) e.push_back(static_cast<double>(k) / cells_per_unit);
  e.insert(e.end(), a.begin(), a.end());
  e.insert(e.end(), b.begin(), b.end());
  for (double x : c) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("grid break outside [0,1]");
    e.push_back(x);
  }
  e.push_back(0.5);
  std::sort(e.begin(), e.end());
  // Collapse near-duplicates produced by lattice/breakpoint round-off, never moving 0, 1/2 or 1.
  std::vector<double> out;
  for (double x : e) {
    if (!out.empty() && x - out.back() <= 1e-13) {
      if (x == 0.5 || x == 1.0) out.back() = x;
      continue;
    }
    out.push_back(x);
  }
  return out;
}

CellGrid fill(std::vector<double> edges, const Potential& q) {
  CellGrid g;
  g.edges = std::move(edges);
  const std::size_t n = g.edges.size() - 1;
  g.width.resize(n);
  g.qbar.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.width[i] = g.edges[i + 1] - g.edges[i];
    g.qbar[i] = q.integrate(g.edges[i], g.edges[i + 1]) / g.width[i];
    g.qmax = std::max(g.qmax, std::abs(g.qbar[i]));
    if (g.edges[i] == 0.5) g.jump_cell = i;
  }
  return g;
}

}  // namespace

CellGrid CellGrid::build(const Potential& q, int cells_per_unit, std::span<const double> extra_breaks) {
  const auto br = q.breakpoints();
  return fill(merged_edges(cells_per_unit, br, {}, extra_breaks), q);
}

CellGrid CellGrid::with_potential(const Potential& q) const { return fill(edges, q); }

double CellGrid::max_width() const { return *std::max_element(width.begin(), width.end()); }

CellGrid build_pair_grid(const Potential& q, const Potential& q_other, int cells_per_unit,
                         std::span<const double> extra_breaks) {
  const auto a = q.breakpoints();
  const auto b = q_other.breakpoints();
  return fill(merged_edges(cells_per_unit, a, b, extra_breaks), q);
}

}  // namespace discospec
