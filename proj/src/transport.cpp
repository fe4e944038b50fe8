#include "graphot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphot/errors.hpp"
#include "graphot/network_simplex.hpp"

namespace graphot {

SupportCloud SupportCloud::from_measure(const GridMeasure& mu) {
  require_probability(mu, "support cloud");
  const Grid& grid = mu.grid;
  const MetricGraph& g = grid.graph();
  SupportCloud cloud;
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      double m = mu.at(e, i);
      if (m > 0.0) {
        cloud.points.push_back(g.canonical({e, grid.cell_center(e, i)}));
        cloud.masses.push_back(m);
      }
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (mu.atom[v] > 0.0) {
      cloud.points.push_back(g.vertex_point(v));
      cloud.masses.push_back(mu.atom[v]);
    }
  }
  return cloud;
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> r(source.size(), 0.0);
  for (const PlanEntry& e : entries) r[e.i] += e.mass;
  return r;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> c(target.size(), 0.0);
  for (const PlanEntry& e : entries) c[e.j] += e.mass;
  return c;
}

void TransportPlan::check_marginals(double tol) const {
  auto r = row_sums();
  auto c = col_sums();
  for (int i = 0; i < source.size(); ++i) {
    if (std::abs(r[i] - source.masses[i]) > tol) {
      throw Error(ErrorCode::PlanMarginalMismatch,
                  "row " + std::to_string(i) + " off by " +
                      std::to_string(r[i] - source.masses[i]));
    }
  }
  for (int j = 0; j < target.size(); ++j) {
    if (std::abs(c[j] - target.masses[j]) > tol) {
      throw Error(ErrorCode::PlanMarginalMismatch,
                  "column " + std::to_string(j) + " off by " +
                      std::to_string(c[j] - target.masses[j]));
    }
  }
}

namespace {

double total(const std::vector<double>& v) {
  double t = 0.0;
  for (double x : v) t += x;
  return t;
}

}  // namespace

WassersteinResult wasserstein(const MetricGraph& g, const SupportCloud& mu,
                              const SupportCloud& nu, int p) {
  if (p != 1 && p != 2) {
    throw Error(ErrorCode::ConfigInvalid, "p must be 1 or 2");
  }
  const int m = mu.size();
  const int n = nu.size();
  if (m == 0 || n == 0) {
    throw Error(ErrorCode::ConfigInvalid, "empty support cloud");
  }
  double sm = total(mu.masses), sn = total(nu.masses);
  if (std::abs(sm - sn) > 1e-9) {
    throw Error(ErrorCode::UnbalancedMasses,
                "source mass " + std::to_string(sm) + " vs target mass " + std::to_string(sn));
  }

  std::vector<double> cost(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = g.distance(mu.points[i], nu.points[j]);
      cost[i * static_cast<size_t>(n) + j] = p == 1 ? d : d * d;
    }
  }

  // Rescale demands so the balance is exact in floating point.
  std::vector<double> demand = nu.masses;
  double scale = sm / sn;
  for (double& b : demand) b *= scale;

  TransportSolution sol = solve_transport(mu.masses, demand, cost);

  WassersteinResult out;
  out.power_cost = sol.primal;
  out.dual_value = sol.dual;
  out.gap = std::abs(sol.primal - sol.dual);
  out.value = p == 1 ? sol.primal : std::sqrt(std::max(0.0, sol.primal));
  out.plan.source = mu;
  out.plan.target = nu;
  for (const TransportArc& a : sol.plan) {
    out.plan.entries.push_back({a.source, a.target, a.mass});
  }
  out.duals.phi = sol.u;
  out.duals.psi = sol.v;
  return out;
}

std::vector<double> c_transform(const MetricGraph& g, const std::vector<GraphPoint>& xs,
                                const std::vector<double>& phi,
                                const std::vector<GraphPoint>& ys, int p) {
  if (xs.size() != phi.size()) {
    throw Error(ErrorCode::ConfigInvalid, "phi values do not match the point set");
  }
  std::vector<double> out(ys.size());
  for (size_t j = 0; j < ys.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < xs.size(); ++i) {
      double d = g.distance(xs[i], ys[j]);
      double c = p == 1 ? d : d * d;
      best = std::min(best, c - phi[i]);
    }
    out[j] = best;
  }
  return out;
}

InterpolationContext prepare_interpolation(const MetricGraph& g, const TransportPlan& plan) {
  InterpolationContext ctx;
  ctx.paths.reserve(plan.entries.size());
  for (const PlanEntry& e : plan.entries) {
    ctx.paths.push_back(g.geodesic(plan.source.points[e.i], plan.target.points[e.j]));
  }
  return ctx;
}

GridMeasure geodesic_interpolation(const MetricGraph& g, const Grid& grid,
                                   const TransportPlan& plan,
                                   const InterpolationContext& ctx, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "t = " + std::to_string(t));
  }
  GridMeasure out(grid);
  for (size_t k = 0; k < plan.entries.size(); ++k) {
    const PlanEntry& e = plan.entries[k];
    GraphPoint p = interpolate(g, ctx.paths[k], t);
    int v = -1;
    if (g.is_vertex_point(p, &v)) {
      out.atom[v] += e.mass;
    } else {
      out.at(p.edge, grid.cell_of(p.edge, p.s)) += e.mass;
    }
  }
  return out;
}

GridMeasure geodesic_interpolation(const MetricGraph& g, const Grid& grid,
                                   const TransportPlan& plan, double t) {
  plan.check_marginals();
  InterpolationContext ctx = prepare_interpolation(g, plan);
  return geodesic_interpolation(g, grid, plan, ctx, t);
}

}  // namespace graphot
