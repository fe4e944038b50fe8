#pragma once

#include "graphot/grid.hpp"
#include "graphot/potential.hpp"

namespace graphot {

// Boltzmann entropy  Ent(mu) = int rho log rho dlambda  for mu = rho lambda,
// +infinity when mu charges a vertex. Requires a probability measure.
double entropy(const GridMeasure& mu);

// Relative entropy with respect to the weighted measure e^{-V} lambda.
double relative_entropy(const GridMeasure& mu, const ScalarPotential& V);

// Potential energy  int V dmu  (defined for atom-free mu).
double potential_energy(const GridMeasure& mu, const ScalarPotential& V);

// Interaction energy  (1/2) int int W(x,y) dmu dmu  over the support points
// (cell centers and vertex atoms).
double interaction_energy(const GridMeasure& mu, const InteractionKernel& W);

// Free energy  F = relative entropy + interaction energy.
double free_energy(const GridMeasure& mu, const ScalarPotential& V,
                   const InteractionKernel& W);

}  // namespace graphot
