#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "discospec/potential.hpp"

namespace discospec {

/// Cell decomposition of [0,1] with the potential frozen to its cell average on each cell.
/// Edges are the uniform lattice k/cells_per_unit united with every potential breakpoint, so
/// piecewise-constant potentials whose breakpoints sit on the lattice are represented exactly.
struct CellGrid {
  std::vector<double> edges;
  std::vector<double> width;
  std::vector<double> qbar;
  std::size_t jump_cell = 0;  // first cell to the right of x = 1/2
  double qmax = 0.0;          // max |qbar|

  static CellGrid build(const Potential& q, int cells_per_unit, std::span<const double> extra_breaks = {});
  /// Same edges, averages of another potential.
  CellGrid with_potential(const Potential& q) const;

  std::size_t cells() const { return width.size(); }
  double max_width() const;
};

/// Union of the lattice and the breakpoints of both potentials (used for pair computations).
CellGrid build_pair_grid(const Potential& q, const Potential& q_other, int cells_per_unit,
                         std::span<const double> extra_breaks = {});

}  // namespace discospec
