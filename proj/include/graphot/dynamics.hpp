#pragma once

#include <vector>

#include "graphot/extended.hpp"
#include "graphot/grid.hpp"

namespace graphot {

// Momentum values at the n_e + 1 cell interfaces of each edge. Values are
// point fluxes (mass per unit time) oriented along the edge parametrisation;
// interface 0 sits at the init vertex.
struct FluxField {
  explicit FluxField(Grid g);

  Grid grid;
  std::vector<double> value;  // flat interface storage

  int interfaces(int e) const { return grid.cells(e) + 1; }
  int flat(int e, int k) const { return offset_[e] + k; }
  double& at(int e, int k) { return value[flat(e, k)]; }
  double at(int e, int k) const { return value[flat(e, k)]; }
  int total() const { return static_cast<int>(value.size()); }

 private:
  std::vector<int> offset_;
};

// Discrete space-time solution of the continuity equation: measures at the
// time nodes, fluxes on the staggered half-steps.
struct SpaceTimePath {
  std::vector<double> times;           // size K+1, increasing
  std::vector<GridMeasure> measures;   // size K+1, atom-free
  std::vector<FluxField> fluxes;       // size K
};

struct ContinuityReport {
  double cell_max = 0.0;
  double cell_l1 = 0.0;
  double vertex_max = 0.0;
  double vertex_l1 = 0.0;
};

// Conservative-update residuals of the staggered path, plus the Kirchhoff
// balance at every vertex and half-step. Throws AtomPresent when a measure
// charges a vertex.
ContinuityReport check_continuity(const SpaceTimePath& path);

// Same residuals for the modified equation carried by regularised paths,
// where each edge's flux divergence is weighted by the given factor.
ContinuityReport check_continuity_weighted(const SpaceTimePath& path,
                                           const std::vector<double>& edge_weight);

struct ActionValue {
  double value = 0.0;  // int |v|^2 dmu  (twice the Benamou-Brenier energy)
  bool finite = true;
};

// Perspective-function action of a single (measure, flux) pair: sum over
// interfaces of |U|^2 / rho_bar weighted by the interface control volume.
// Infinite when mass is negative or momentum crosses an empty interface.
ActionValue bb_action(const GridMeasure& mu, const FluxField& flux);

struct BBSolveParams {
  int max_iterations = 200000;
  double action_tol = 1e-7;      // relative action change between checks
  double continuity_tol = 1e-9;  // feasibility residual bound
  int check_every = 100;
  int power_iterations = 50;
  double step_ratio = 0.1;       // dual step / primal step
  double relaxation = 1.9;       // over-relaxation of the primal-dual pair
  bool throw_on_cap = true;
};

struct BBSolution {
  SpaceTimePath path;
  double action = 0.0;  // discrete  int_0^1 int |v|^2 dmu dt  ~  W_2^2
  int iterations = 0;
  double continuity_residual = 0.0;
  bool converged = false;
};

// Dynamic optimal transport between two atom-free probability measures on a
// shared grid: minimises the staggered action subject to the discrete
// continuity equation with Kirchhoff vertex constraints and pinned
// endpoints, by a primal-dual iteration whose constraint step is an exact
// affine projection.
BBSolution solve_bb(const Grid& grid, const GridMeasure& mu0, const GridMeasure& mu1,
                    int time_steps, const BBSolveParams& params = {});

// Regularises every measure and flux of the path onto the extended grid;
// the result solves the edge-weighted continuity equation up to the input
// residual plus resampling error.
SpaceTimePath regularize_path(const ExtendedGraph& ext, const Grid& ext_grid,
                              const SpaceTimePath& path);

}  // namespace graphot
