#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "graphot/graph.hpp"

namespace graphot {

// Per-edge uniform cell partition of a metric graph. Cells tile each edge
// exactly: edge e carries cells(e) cells of width length(e)/cells(e).
class Grid {
 public:
  Grid(std::shared_ptr<const MetricGraph> graph, double target_width);
  Grid(std::shared_ptr<const MetricGraph> graph, std::vector<int> cells_per_edge);

  const MetricGraph& graph() const { return *graph_; }
  const std::shared_ptr<const MetricGraph>& graph_ptr() const { return graph_; }

  int cells(int e) const { return cells_[e]; }
  double width(int e) const { return width_[e]; }
  int num_cells() const { return total_cells_; }
  int offset(int e) const { return offset_[e]; }
  int flat(int e, int i) const { return offset_[e] + i; }

  double cell_left(int e, int i) const { return i * width_[e]; }
  double cell_right(int e, int i) const { return (i + 1) * width_[e]; }
  double cell_center(int e, int i) const { return (i + 0.5) * width_[e]; }

  // Cell containing coordinate s on edge e (boundary coordinates go right,
  // the last cell absorbs s = length).
  int cell_of(int e, double s) const {
    int i = static_cast<int>(std::floor(s / width_[e]));
    if (i < 0) i = 0;
    if (i >= cells_[e]) i = cells_[e] - 1;
    return i;
  }

  bool same_layout(const Grid& other) const {
    return graph_.get() == other.graph_.get() && cells_ == other.cells_;
  }

 private:
  void finish();

  std::shared_ptr<const MetricGraph> graph_;
  std::vector<int> cells_;
  std::vector<double> width_;
  std::vector<int> offset_;
  int total_cells_ = 0;
};

// Discretised Borel measure: nonnegative cell masses plus optional vertex
// atoms. Densities are understood as piecewise constant per cell.
struct GridMeasure {
  explicit GridMeasure(Grid g)
      : grid(std::move(g)),
        mass(grid.num_cells(), 0.0),
        atom(grid.graph().num_vertices(), 0.0) {}

  Grid grid;
  std::vector<double> mass;
  std::vector<double> atom;

  double& at(int e, int i) { return mass[grid.flat(e, i)]; }
  double at(int e, int i) const { return mass[grid.flat(e, i)]; }
  double density(int e, int i) const { return mass[grid.flat(e, i)] / grid.width(e); }

  double total_mass() const;
  double atom_mass() const;
  bool is_probability(double tol = 1e-12) const;
  void normalize();  // scale to unit total mass
};

GridMeasure lebesgue(const Grid& grid);

// Requires unit total mass; throws NotProbability otherwise.
void require_probability(const GridMeasure& mu, const char* what);

// Throws AtomPresent if the measure carries vertex atoms.
void require_atom_free(const GridMeasure& mu, const char* what);

}  // namespace graphot
