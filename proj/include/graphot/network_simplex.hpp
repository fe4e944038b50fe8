#pragma once

#include <vector>

namespace graphot {

struct TransportArc {
  int source = 0;
  int target = 0;
  double mass = 0.0;
};

struct TransportSolution {
  double primal = 0.0;
  double dual = 0.0;
  std::vector<TransportArc> plan;  // basic arcs with positive flow
  std::vector<double> u;           // source potentials
  std::vector<double> v;           // sink potentials
  int pivots = 0;
};

// Exact solver for the dense uncapacitated transportation problem
//   min sum_ij c_ij x_ij   s.t.  sum_j x_ij = supply_i, sum_i x_ij = demand_j
// by the primal network simplex on the spanning-tree basis. cost is row-major
// with stride demand.size(). Supplies and demands must be positive and
// balanced; the caller checks mass balance beforehand.
TransportSolution solve_transport(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::vector<double>& cost);

}  // namespace graphot
