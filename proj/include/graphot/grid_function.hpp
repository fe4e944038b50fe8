#pragma once

#include <functional>

#include "graphot/grid.hpp"
#include "graphot/piecewise.hpp"

namespace graphot {

// Sampled scalar function on a grid: one value per cell center plus one
// value per vertex. The induced per-edge interpolant is piecewise linear
// through (0, vertex), (cell centers), (length, vertex), which makes it
// continuous on the graph whenever the vertex values are shared.
struct GridFunction {
  explicit GridFunction(Grid g)
      : grid(std::move(g)),
        cell(grid.num_cells(), 0.0),
        vertex(grid.graph().num_vertices(), 0.0) {}

  Grid grid;
  std::vector<double> cell;
  std::vector<double> vertex;

  double& at(int e, int i) { return cell[grid.flat(e, i)]; }
  double at(int e, int i) const { return cell[grid.flat(e, i)]; }

  double evaluate(int e, double s) const { return edge_profile(e).evaluate(s); }
  PiecewiseLinear edge_profile(int e) const;

  double max_abs() const;

  // Samples f(edge, s) at cell centers and vertices; vertex values are taken
  // from the lowest incident edge endpoint (callers supply continuous f when
  // continuity matters).
  static GridFunction sample(const Grid& grid,
                             const std::function<double(int, double)>& f);
};

}  // namespace graphot
