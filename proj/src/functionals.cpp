#include "graphot/functionals.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "graphot/errors.hpp"

namespace graphot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx(double r) { return r > 0.0 ? r * std::log(r) : 0.0; }
}  // namespace

double entropy(const GridMeasure& mu) {
  require_probability(mu, "entropy");
  if (mu.atom_mass() > 0.0) return kInf;
  const Grid& grid = mu.grid;
  double total = 0.0;
  for (int e = 0; e < grid.graph().num_edges(); ++e) {
    const double h = grid.width(e);
    for (int i = 0; i < grid.cells(e); ++i) {
      total += h * xlogx(mu.at(e, i) / h);
    }
  }
  return total;
}

double relative_entropy(const GridMeasure& mu, const ScalarPotential& V) {
  require_probability(mu, "relative_entropy");
  if (mu.atom_mass() > 0.0) return kInf;
  if (!mu.grid.same_layout(V.grid())) {
    throw Error(ErrorCode::GridMismatch, "potential sampled on a different grid");
  }
  const Grid& grid = mu.grid;
  double total = 0.0;
  for (int e = 0; e < grid.graph().num_edges(); ++e) {
    const double h = grid.width(e);
    for (int i = 0; i < grid.cells(e); ++i) {
      const double weight = std::exp(-V.cell(e, i));  // reference density
      const double rel = mu.at(e, i) / h / weight;    // rho / e^{-V}
      total += h * weight * xlogx(rel);
    }
  }
  return total;
}

double potential_energy(const GridMeasure& mu, const ScalarPotential& V) {
  require_atom_free(mu, "potential_energy");
  if (!mu.grid.same_layout(V.grid())) {
    throw Error(ErrorCode::GridMismatch, "potential sampled on a different grid");
  }
  const Grid& grid = mu.grid;
  double total = 0.0;
  for (int e = 0; e < grid.graph().num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      total += V.cell(e, i) * mu.at(e, i);
    }
  }
  return total;
}

double interaction_energy(const GridMeasure& mu, const InteractionKernel& W) {
  if (W.is_zero()) return 0.0;
  const Grid& grid = mu.grid;
  const MetricGraph& g = grid.graph();

  std::vector<GraphPoint> pts;
  std::vector<double> m;
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      if (mu.at(e, i) != 0.0) {
        pts.push_back(g.canonical({e, grid.cell_center(e, i)}));
        m.push_back(mu.at(e, i));
      }
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (mu.atom[v] != 0.0) {
      pts.push_back(g.vertex_point(v));
      m.push_back(mu.atom[v]);
    }
  }

  if (W.is_table()) {
    W.check_table_symmetric();
    if (W.table_size() != static_cast<int>(pts.size())) {
      throw Error(ErrorCode::ConfigInvalid,
                  "kernel table size does not match measure support");
    }
    double total = 0.0;
    for (size_t p = 0; p < pts.size(); ++p) {
      for (size_t q = 0; q < pts.size(); ++q) {
        total += W.table_value(static_cast<int>(p), static_cast<int>(q)) * m[p] * m[q];
      }
    }
    return 0.5 * total;
  }

  double total = 0.0;
  for (size_t p = 0; p < pts.size(); ++p) {
    total += W.evaluate(g, pts[p], pts[p]) * m[p] * m[p];
    for (size_t q = p + 1; q < pts.size(); ++q) {
      total += 2.0 * W.evaluate(g, pts[p], pts[q]) * m[p] * m[q];
    }
  }
  return 0.5 * total;
}

double free_energy(const GridMeasure& mu, const ScalarPotential& V,
                   const InteractionKernel& W) {
  double ev = relative_entropy(mu, V);
  if (ev == kInf) return kInf;
  return ev + interaction_energy(mu, W);
}

}  // namespace graphot
