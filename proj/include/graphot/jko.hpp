#pragma once

#include <vector>

#include "graphot/dynamics.hpp"
#include "graphot/grid.hpp"
#include "graphot/potential.hpp"

namespace graphot {

struct JkoParams {
  int inner_steps = 4;  // transport discretisation inside one move
  BBSolveParams bb;     // inner primal-dual controls
};

struct JkoStepResult {
  GridMeasure minimiser;
  double objective = 0.0;       // F(result) + action/(2 tau)
  double move_cost = 0.0;       // discrete squared transport cost of the move
  double free_energy = 0.0;     // F(result)
  int iterations = 0;
};

// One minimising-movement step:  argmin_nu  F(nu) + W_2^2(nu, mu)/(2 tau),
// solved by the dynamic-transport primal-dual engine with a free terminal
// measure and the free energy as terminal cost. The interaction term is
// linearised around mu (frozen mean field). Free energy never increases: if
// the inexact minimiser fails that, the step falls back towards mu along the
// segment until it holds.
JkoStepResult jko_step(const GridMeasure& mu, double tau, const ScalarPotential& V,
                       const InteractionKernel& W, const JkoParams& params = {});

// Iterates jko_step; returns [mu_0, mu_1, ..., mu_steps].
std::vector<GridMeasure> jko_flow(const GridMeasure& mu0, double tau, int steps,
                                  const ScalarPotential& V, const InteractionKernel& W,
                                  const JkoParams& params = {});

}  // namespace graphot
