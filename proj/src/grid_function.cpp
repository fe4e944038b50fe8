#include "graphot/grid_function.hpp"

#include <cmath>

namespace graphot {

PiecewiseLinear GridFunction::edge_profile(int e) const {
  std::vector<double> centers(cell.begin() + grid.offset(e),
                              cell.begin() + grid.offset(e) + grid.cells(e));
  return PiecewiseLinear::from_cell_samples(grid.graph().edge_length(e), centers,
                                            vertex[grid.graph().edge_init(e)],
                                            vertex[grid.graph().edge_term(e)]);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : cell) m = std::max(m, std::abs(v));
  for (double v : vertex) m = std::max(m, std::abs(v));
  return m;
}

GridFunction GridFunction::sample(const Grid& grid,
                                  const std::function<double(int, double)>& f) {
  GridFunction out(grid);
  const MetricGraph& g = grid.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      out.at(e, i) = f(e, grid.cell_center(e, i));
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    GraphPoint p = g.vertex_point(v);
    out.vertex[v] = f(p.edge, p.s);
  }
  return out;
}

}  // namespace graphot
