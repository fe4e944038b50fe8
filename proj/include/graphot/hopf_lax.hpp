#pragma once

#include <vector>

#include "graphot/grid.hpp"

namespace graphot {

// Sample points for functions on the graph: all cell centers followed by all
// vertices, with the pairwise distance matrix precomputed.
struct GridPointSet {
  std::vector<GraphPoint> points;
  std::vector<int> cell_of_point;    // flat cell index, -1 for vertex points
  std::vector<int> vertex_of_point;  // vertex index, -1 for cell points
  std::vector<double> dist;          // row-major size() x size()

  static GridPointSet build(const Grid& grid);
  int size() const { return static_cast<int>(points.size()); }
  double distance(int a, int b) const { return dist[a * static_cast<size_t>(points.size()) + b]; }
};

// Hopf-Lax evolution  Q_t f(x) = min_y { f(y) + d^2(x,y) / (2t) }  by
// exhaustive minimisation over the sample points; Q_0 f = f.
std::vector<double> hopf_lax(const GridPointSet& pts, const std::vector<double>& f, double t);

struct HopfLaxReport {
  double lip_f = 0.0;            // discrete global Lipschitz constant of f
  double max_lip_ratio = 0.0;    // max_t Lip(Q_t f) / Lip(f)
  double max_hj_residual = 0.0;  // max over interior samples and times
  double delta_hj = 0.0;         // residual budget 4 Lip(f)^2 (h + dt)
  double grid_h = 0.0;
  double dt = 0.0;
};

// Checks the semigroup estimates: the Lipschitz bound Lip(Q_t f) <= 2 Lip(f)
// and the Hamilton-Jacobi inequality with centred time differences and
// discrete local slopes at interior sample points.
HopfLaxReport verify_hopf_lax_properties(const Grid& grid, const GridPointSet& pts,
                                         const std::vector<double>& f,
                                         const std::vector<double>& times, double dt);

}  // namespace graphot
