#pragma once

#include <vector>

#include "graphot/graph.hpp"
#include "graphot/grid.hpp"

namespace graphot {

// Finite-support probability measure on the graph: canonicalised points with
// nonnegative masses summing to one.
struct SupportCloud {
  std::vector<GraphPoint> points;
  std::vector<double> masses;

  static SupportCloud from_measure(const GridMeasure& mu);
  int size() const { return static_cast<int>(points.size()); }
};

struct PlanEntry {
  int i = 0;
  int j = 0;
  double mass = 0.0;
};

struct TransportPlan {
  SupportCloud source;
  SupportCloud target;
  std::vector<PlanEntry> entries;

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  // Throws PlanMarginalMismatch when the entries do not reproduce the
  // cloud masses within tol.
  void check_marginals(double tol = 1e-10) const;
};

struct DualPotentials {
  std::vector<double> phi;  // on source points
  std::vector<double> psi;  // on target points
};

struct WassersteinResult {
  double value = 0.0;       // W_p
  double power_cost = 0.0;  // optimal value of the linear program (cost d^p)
  double dual_value = 0.0;
  double gap = 0.0;         // |primal - dual|
  TransportPlan plan;
  DualPotentials duals;
};

// Exact W_p (p in {1,2}) between finite-support probability measures, via
// the transportation network simplex on the dense d^p cost matrix.
WassersteinResult wasserstein(const MetricGraph& g, const SupportCloud& mu,
                              const SupportCloud& nu, int p);

// c-transform  phi^c(y) = min_x d^p(x, y) - phi(x)  over the source set.
std::vector<double> c_transform(const MetricGraph& g, const std::vector<GraphPoint>& xs,
                                const std::vector<double>& phi,
                                const std::vector<GraphPoint>& ys, int p);

// Displacement interpolation: pushes every plan entry a fraction t along its
// geodesic and rebins onto the grid (vertex hits become atoms).
GridMeasure geodesic_interpolation(const MetricGraph& g, const Grid& grid,
                                   const TransportPlan& plan, double t);

// Precomputed geodesics for repeated interpolation queries of one plan.
struct InterpolationContext {
  std::vector<GeodesicPath> paths;  // one per plan entry
};
InterpolationContext prepare_interpolation(const MetricGraph& g, const TransportPlan& plan);
GridMeasure geodesic_interpolation(const MetricGraph& g, const Grid& grid,
                                   const TransportPlan& plan,
                                   const InterpolationContext& ctx, double t);

}  // namespace graphot
