#include "graphot/extended.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphot/errors.hpp"

namespace graphot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ExtendedGraph::ExtendedGraph(std::shared_ptr<const MetricGraph> base, double epsilon)
    : base_(std::move(base)), epsilon_(epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "epsilon must be positive");
  }
  if (2.0 * epsilon >= base_->min_edge_length()) {
    throw Error(ErrorCode::EpsilonTooLarge,
                "2*epsilon = " + std::to_string(2.0 * epsilon) +
                    " must be below the shortest edge length " +
                    std::to_string(base_->min_edge_length()));
  }
  GraphSpec spec;
  for (int v = 0; v < base_->num_vertices(); ++v) {
    spec.vertices.push_back(base_->vertex_name(v));
  }
  for (int v = 0; v < base_->num_vertices(); ++v) {
    spec.vertices.push_back(base_->vertex_name(v) + "#ext");
  }
  for (int e = 0; e < base_->num_edges(); ++e) {
    spec.edges.push_back({base_->edge_id(e), base_->vertex_name(base_->edge_init(e)),
                          base_->vertex_name(base_->edge_term(e)), base_->edge_length(e)});
  }
  for (int v = 0; v < base_->num_vertices(); ++v) {
    spec.edges.push_back({"ext:" + base_->vertex_name(v), base_->vertex_name(v),
                          base_->vertex_name(v) + "#ext", 2.0 * epsilon});
  }
  ext_ = std::make_shared<const MetricGraph>(MetricGraph::build(spec));
}

Grid extend_grid(const ExtendedGraph& ext, const Grid& base_grid) {
  if (base_grid.graph_ptr().get() != &ext.base()) {
    throw Error(ErrorCode::GridMismatch, "grid does not live on the base graph");
  }
  std::vector<int> cells;
  for (int e = 0; e < ext.base_edges(); ++e) cells.push_back(base_grid.cells(e));
  for (int v = 0; v < ext.base_vertices(); ++v) {
    double h = kInf;
    for (auto [e, sign] : ext.base().incident_edges(v)) {
      h = std::min(h, base_grid.width(e));
    }
    cells.push_back(std::max(1, static_cast<int>(std::llround(2.0 * ext.epsilon() / h))));
  }
  return Grid(ext.extended_ptr(), std::move(cells));
}

Grid restrict_grid(const ExtendedGraph& ext, const Grid& ext_grid) {
  if (ext_grid.graph_ptr().get() != &ext.extended()) {
    throw Error(ErrorCode::GridMismatch, "grid does not live on the extended graph");
  }
  std::vector<int> cells;
  for (int e = 0; e < ext.base_edges(); ++e) cells.push_back(ext_grid.cells(e));
  return Grid(ext.base_ptr(), std::move(cells));
}

PiecewiseLinear extended_line_profile(const ExtendedGraph& ext, const GridFunction& phi,
                                      int base_edge) {
  if (phi.grid.graph_ptr().get() != &ext.extended()) {
    throw Error(ErrorCode::GridMismatch, "function does not live on the extended graph");
  }
  const MetricGraph& base = ext.base();
  const double half = 0.5 * base.edge_length(base_edge);
  const int v_init = base.edge_init(base_edge);
  const int v_term = base.edge_term(base_edge);

  PiecewiseLinear init_aux = phi.edge_profile(ext.aux_edge(v_init));
  PiecewiseLinear edge = phi.edge_profile(base_edge);
  PiecewiseLinear term_aux = phi.edge_profile(ext.aux_edge(v_term));

  PiecewiseLinear line;
  // init-side auxiliary edge, traversed from the leaf towards the vertex
  for (size_t j = init_aux.x.size(); j-- > 0;) {
    line.x.push_back(-half - init_aux.x[j]);
    line.v.push_back(init_aux.v[j]);
  }
  // base edge shifted to centered coordinates; skip the duplicated vertex knot
  for (size_t j = 1; j < edge.x.size(); ++j) {
    line.x.push_back(edge.x[j] - half);
    line.v.push_back(edge.v[j]);
  }
  for (size_t j = 1; j < term_aux.x.size(); ++j) {
    line.x.push_back(half + term_aux.x[j]);
    line.v.push_back(term_aux.v[j]);
  }
  return line;
}

double regularized_value(const ExtendedGraph& ext, const GridFunction& phi, int base_edge,
                         double s) {
  const double eps = ext.epsilon();
  const double half = 0.5 * ext.base().edge_length(base_edge);
  const double x = s - half;
  const double a = ext.alpha(base_edge);
  PiecewiseLinear line = extended_line_profile(ext, phi, base_edge);
  return line.integral(a * x - eps, a * x + eps) / (2.0 * eps);
}

double regularized_gradient(const ExtendedGraph& ext, const GridFunction& phi, int base_edge,
                            double s) {
  const double eps = ext.epsilon();
  const double half = 0.5 * ext.base().edge_length(base_edge);
  const double x = s - half;
  const double a = ext.alpha(base_edge);
  PiecewiseLinear line = extended_line_profile(ext, phi, base_edge);
  return a / (2.0 * eps) * (line.evaluate(a * x + eps) - line.evaluate(a * x - eps));
}

double regularized_vertex_value(const ExtendedGraph& ext, const GridFunction& phi, int v) {
  PiecewiseLinear aux = phi.edge_profile(ext.aux_edge(v));
  return aux.integral() / (2.0 * ext.epsilon());
}

GridFunction regularize_function(const ExtendedGraph& ext, const GridFunction& phi) {
  Grid base_grid = restrict_grid(ext, phi.grid);
  GridFunction out(base_grid);
  const double eps = ext.epsilon();
  for (int e = 0; e < ext.base_edges(); ++e) {
    PiecewiseLinear line = extended_line_profile(ext, phi, e);
    const double a = ext.alpha(e);
    const double half = 0.5 * ext.base().edge_length(e);
    for (int i = 0; i < base_grid.cells(e); ++i) {
      const double x = base_grid.cell_center(e, i) - half;
      out.at(e, i) = line.integral(a * x - eps, a * x + eps) / (2.0 * eps);
    }
  }
  for (int v = 0; v < ext.base_vertices(); ++v) {
    out.vertex[v] = regularized_vertex_value(ext, phi, v);
  }
  return out;
}

namespace {

// Cumulative mass of the per-cell values of edge e, as a piecewise-linear
// function of the edge coordinate s in [0, length].
PiecewiseLinear edge_cdf(const Grid& grid, const std::vector<double>& cell_mass, int e) {
  PiecewiseLinear cdf;
  const int n = grid.cells(e);
  cdf.x.reserve(n + 1);
  cdf.v.reserve(n + 1);
  double run = 0.0;
  cdf.x.push_back(0.0);
  cdf.v.push_back(0.0);
  for (int i = 0; i < n; ++i) {
    run += cell_mass[grid.flat(e, i)];
    cdf.x.push_back(grid.cell_right(e, i));
    cdf.v.push_back(run);
  }
  return cdf;
}

std::vector<double> sorted_unique(std::vector<double> pts, double tol) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (out.empty() || p - out.back() > tol) out.push_back(p);
  }
  return out;
}

// Shared pushforward: spreads per-cell masses (signed allowed) and vertex
// atoms through the averaging windows; returns the exact density profile on
// every extended edge, in that edge's own coordinates.
std::vector<PiecewiseLinear> pushforward_profiles(const ExtendedGraph& ext,
                                                  const Grid& base_grid,
                                                  const std::vector<double>& cell_mass,
                                                  const std::vector<double>& atom) {
  const MetricGraph& base = ext.base();
  const double eps = ext.epsilon();
  std::vector<PiecewiseLinear> profiles(base.num_edges() + base.num_vertices());

  std::vector<PiecewiseLinear> cdf(base.num_edges());
  for (int e = 0; e < base.num_edges(); ++e) {
    cdf[e] = edge_cdf(base_grid, cell_mass, e);
  }

  // Base edges: window stays inside the edge; clamps only touch the ends.
  for (int e = 0; e < base.num_edges(); ++e) {
    const double len = base.edge_length(e);
    const double half = 0.5 * len;
    const double a = ext.alpha(e);
    std::vector<double> breaks{-half, half};
    for (size_t j = 0; j < cdf[e].x.size(); ++j) {
      const double c = cdf[e].x[j] - half;  // centered boundary
      for (double z : {a * c - eps, a * c + eps}) {
        if (z > -half && z < half) breaks.push_back(z);
      }
    }
    breaks = sorted_unique(std::move(breaks), 1e-14 * (1.0 + len));
    PiecewiseLinear prof;
    for (double z : breaks) {
      const double u1 = std::max((z - eps) / a, -half);
      const double u2 = std::min((z + eps) / a, half);
      prof.x.push_back(z + half);  // back to edge coordinates
      prof.v.push_back((cdf[e].evaluate(u2 + half) - cdf[e].evaluate(u1 + half)) /
                       (2.0 * eps));
    }
    profiles[e] = std::move(prof);
  }

  // Auxiliary edges: contributions from every incident edge plus the atom.
  for (int v = 0; v < base.num_vertices(); ++v) {
    std::vector<double> breaks{0.0, 2.0 * eps};
    for (auto [e, sign] : base.incident_edges(v)) {
      const double len = base.edge_length(e);
      const double half = 0.5 * len;
      const double a = ext.alpha(e);
      for (size_t j = 0; j < cdf[e].x.size(); ++j) {
        const double c = cdf[e].x[j] - half;
        const double u = sign < 0 ? a * c + eps - half   // v = term side
                                  : -half - a * c + eps;  // v = init side
        if (u > 0.0 && u < 2.0 * eps) breaks.push_back(u);
      }
    }
    breaks = sorted_unique(std::move(breaks), 1e-14 * (1.0 + 2.0 * eps));

    PiecewiseLinear prof;
    for (double u : breaks) {
      double val = atom[v];  // d(x, v) <= 2 eps holds on the whole aux edge
      for (auto [e, sign] : base.incident_edges(v)) {
        const double len = base.edge_length(e);
        const double half = 0.5 * len;
        const double a = ext.alpha(e);
        if (sign < 0) {
          const double z = half + u;
          const double u1 = std::max((z - eps) / a, -half);
          val += cdf[e].evaluate(half + half) - cdf[e].evaluate(u1 + half);
        } else {
          const double z = -half - u;
          const double u2 = std::min((z + eps) / a, half);
          val += cdf[e].evaluate(u2 + half);
        }
      }
      prof.x.push_back(u);
      prof.v.push_back(val / (2.0 * eps));
    }
    profiles[base.num_edges() + v] = std::move(prof);
  }
  return profiles;
}

}  // namespace

std::vector<PiecewiseLinear> regularized_density(const ExtendedGraph& ext,
                                                 const GridMeasure& mu) {
  if (mu.grid.graph_ptr().get() != &ext.base()) {
    throw Error(ErrorCode::GridMismatch, "measure does not live on the base graph");
  }
  return pushforward_profiles(ext, mu.grid, mu.mass, mu.atom);
}

std::vector<PiecewiseLinear> regularized_momentum(const ExtendedGraph& ext,
                                                  const Grid& base_grid,
                                                  const std::vector<double>& cell_values) {
  std::vector<double> cell_mass(base_grid.num_cells());
  for (int e = 0; e < ext.base_edges(); ++e) {
    for (int i = 0; i < base_grid.cells(e); ++i) {
      cell_mass[base_grid.flat(e, i)] = cell_values[base_grid.flat(e, i)] * base_grid.width(e);
    }
  }
  std::vector<double> no_atoms(ext.base_vertices(), 0.0);
  return pushforward_profiles(ext, base_grid, cell_mass, no_atoms);
}

GridMeasure regularize_measure(const ExtendedGraph& ext, const Grid& ext_grid,
                               const GridMeasure& mu) {
  if (ext_grid.graph_ptr().get() != &ext.extended()) {
    throw Error(ErrorCode::GridMismatch, "target grid does not live on the extended graph");
  }
  auto profiles = regularized_density(ext, mu);
  GridMeasure out(ext_grid);
  for (int e = 0; e < ext.extended().num_edges(); ++e) {
    for (int i = 0; i < ext_grid.cells(e); ++i) {
      out.at(e, i) = profiles[e].integral(ext_grid.cell_left(e, i), ext_grid.cell_right(e, i));
    }
  }
  return out;
}

double integrate_against_profiles(const Grid& ext_grid,
                                  const std::vector<PiecewiseLinear>& density,
                                  const GridFunction& phi_ext) {
  double total = 0.0;
  for (int e = 0; e < ext_grid.graph().num_edges(); ++e) {
    total += integrate_product(phi_ext.edge_profile(e), density[e], 0.0,
                               ext_grid.graph().edge_length(e));
  }
  return total;
}

double integrate_regularized_against(const ExtendedGraph& ext, const GridFunction& phi_ext,
                                     const GridMeasure& mu) {
  const double eps = ext.epsilon();
  double total = 0.0;
  for (int e = 0; e < ext.base_edges(); ++e) {
    PiecewiseLinear line = extended_line_profile(ext, phi_ext, e);
    const double a = ext.alpha(e);
    const double half = 0.5 * ext.base().edge_length(e);
    for (int i = 0; i < mu.grid.cells(e); ++i) {
      const double m = mu.at(e, i);
      if (m == 0.0) continue;
      const double rho = m / mu.grid.width(e);
      const double lo = mu.grid.cell_left(e, i) - half;
      const double hi = mu.grid.cell_right(e, i) - half;
      const double plus = line.antiderivative_integral(a * lo + eps, a * hi + eps);
      const double minus = line.antiderivative_integral(a * lo - eps, a * hi - eps);
      total += rho * (plus - minus) / (2.0 * eps * a);
    }
  }
  for (int v = 0; v < ext.base_vertices(); ++v) {
    if (mu.atom[v] != 0.0) {
      total += mu.atom[v] * regularized_vertex_value(ext, phi_ext, v);
    }
  }
  return total;
}

KineticEnergyPair kinetic_energy_pair(const ExtendedGraph& ext, const GridMeasure& mu,
                                      const std::vector<double>& cell_momentum) {
  KineticEnergyPair out;
  const Grid& grid = mu.grid;
  for (int e = 0; e < ext.base_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      const double rho = mu.density(e, i);
      const double u = cell_momentum[grid.flat(e, i)];
      if (rho > 0.0) {
        out.input += u * u / rho * grid.width(e);
      } else if (u != 0.0) {
        out.input = kInf;
      }
    }
  }
  auto rho_eps = regularized_density(ext, mu);
  auto mom_eps = regularized_momentum(ext, mu.grid, cell_momentum);
  for (size_t e = 0; e < rho_eps.size(); ++e) {
    out.regularized += integrate_ratio_square(mom_eps[e], rho_eps[e]);
  }
  return out;
}

}  // namespace graphot
