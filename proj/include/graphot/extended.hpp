#pragma once

#include <memory>
#include <vector>

#include "graphot/grid.hpp"
#include "graphot/grid_function.hpp"
#include "graphot/piecewise.hpp"

namespace graphot {

// Supergraph obtained by adjoining one auxiliary leaf edge of length
// 2*epsilon to every vertex; requires 2*epsilon < min edge length. Base
// edges and vertices keep their indices in the extended graph; auxiliary
// edges are oriented base vertex -> leaf.
class ExtendedGraph {
 public:
  ExtendedGraph(std::shared_ptr<const MetricGraph> base, double epsilon);

  const MetricGraph& base() const { return *base_; }
  const std::shared_ptr<const MetricGraph>& base_ptr() const { return base_; }
  const MetricGraph& extended() const { return *ext_; }
  const std::shared_ptr<const MetricGraph>& extended_ptr() const { return ext_; }

  double epsilon() const { return epsilon_; }
  int base_edges() const { return base_->num_edges(); }
  int base_vertices() const { return base_->num_vertices(); }
  int aux_edge(int base_vertex) const { return base_->num_edges() + base_vertex; }
  bool is_aux_edge(int ext_edge) const { return ext_edge >= base_->num_edges(); }
  int aux_vertex_of(int ext_edge) const { return ext_edge - base_->num_edges(); }

  // Window stretch factor (l_e + 2 eps) / l_e for base edge e.
  double alpha(int base_edge) const {
    return (base_->edge_length(base_edge) + 2.0 * epsilon_) / base_->edge_length(base_edge);
  }

 private:
  std::shared_ptr<const MetricGraph> base_;
  std::shared_ptr<const MetricGraph> ext_;
  double epsilon_ = 0.0;
};

// Extended grid: base edges keep base_grid's cell counts; each auxiliary
// edge is partitioned at (roughly) the smallest incident base cell width.
Grid extend_grid(const ExtendedGraph& ext, const Grid& base_grid);
Grid restrict_grid(const ExtendedGraph& ext, const Grid& ext_grid);

// Profile of phi along base edge e and its two auxiliary edges, in centered
// coordinates on [-l/2 - 2eps, l/2 + 2eps]. phi lives on an extended grid.
PiecewiseLinear extended_line_profile(const ExtendedGraph& ext, const GridFunction& phi,
                                      int base_edge);

// Exact kernel-average value  phi^eps(s on base edge e)  and its gradient.
double regularized_value(const ExtendedGraph& ext, const GridFunction& phi, int base_edge,
                         double s);
double regularized_gradient(const ExtendedGraph& ext, const GridFunction& phi, int base_edge,
                            double s);
double regularized_vertex_value(const ExtendedGraph& ext, const GridFunction& phi, int v);

// phi^eps sampled on the base grid (cell centers and vertices); phi lives on
// the matching extended grid.
GridFunction regularize_function(const ExtendedGraph& ext, const GridFunction& phi);

// Exact density of mu^eps on each extended edge, computed from the interval
// formula (vertex atoms spread uniformly over their auxiliary edge). Result
// is indexed by extended edge.
std::vector<PiecewiseLinear> regularized_density(const ExtendedGraph& ext,
                                                 const GridMeasure& mu);

// Same pushforward applied to a signed momentum density given per base cell.
std::vector<PiecewiseLinear> regularized_momentum(const ExtendedGraph& ext,
                                                  const Grid& base_grid,
                                                  const std::vector<double>& cell_values);

// mu^eps binned on ext_grid: cell masses are exact integrals of the density.
GridMeasure regularize_measure(const ExtendedGraph& ext, const Grid& ext_grid,
                               const GridMeasure& mu);

// int phi d(mu^eps), with mu^eps represented by exact density profiles.
double integrate_against_profiles(const Grid& ext_grid,
                                  const std::vector<PiecewiseLinear>& density,
                                  const GridFunction& phi_ext);

// int phi^eps dmu, with phi^eps evaluated exactly (kernel-integral route).
double integrate_regularized_against(const ExtendedGraph& ext, const GridFunction& phi_ext,
                                     const GridMeasure& mu);

struct KineticEnergyPair {
  double input = 0.0;        // int |v|^2 dmu for J = v mu
  double regularized = 0.0;  // int |v^eps|^2 dmu^eps
};

// Prop.-style kinetic energy comparison: the regularised pair never has more
// kinetic energy than the input pair. cell_momentum holds the per-cell
// density values of J.
KineticEnergyPair kinetic_energy_pair(const ExtendedGraph& ext, const GridMeasure& mu,
                                      const std::vector<double>& cell_momentum);

}  // namespace graphot
