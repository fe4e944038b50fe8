#include "graphot/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphot/errors.hpp"

namespace graphot {

GridPointSet GridPointSet::build(const Grid& grid) {
  const MetricGraph& g = grid.graph();
  GridPointSet out;
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      out.points.push_back(g.canonical({e, grid.cell_center(e, i)}));
      out.cell_of_point.push_back(grid.flat(e, i));
      out.vertex_of_point.push_back(-1);
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    out.points.push_back(g.vertex_point(v));
    out.cell_of_point.push_back(-1);
    out.vertex_of_point.push_back(v);
  }
  const int N = out.size();
  out.dist.assign(static_cast<size_t>(N) * N, 0.0);
  for (int a = 0; a < N; ++a) {
    for (int b = a + 1; b < N; ++b) {
      double d = g.distance(out.points[a], out.points[b]);
      out.dist[a * static_cast<size_t>(N) + b] = d;
      out.dist[b * static_cast<size_t>(N) + a] = d;
    }
  }
  return out;
}

std::vector<double> hopf_lax(const GridPointSet& pts, const std::vector<double>& f, double t) {
  if (t < 0.0) {
    throw Error(ErrorCode::NegativeTime, "t = " + std::to_string(t));
  }
  if (f.size() != static_cast<size_t>(pts.size())) {
    throw Error(ErrorCode::ConfigInvalid, "function values do not match the point set");
  }
  if (t == 0.0) return f;
  const int N = pts.size();
  std::vector<double> out(N);
  const double inv = 1.0 / (2.0 * t);
  for (int a = 0; a < N; ++a) {
    double best = std::numeric_limits<double>::infinity();
    const double* row = &pts.dist[a * static_cast<size_t>(N)];
    for (int b = 0; b < N; ++b) {
      best = std::min(best, f[b] + row[b] * row[b] * inv);
    }
    out[a] = best;
  }
  return out;
}

namespace {

double discrete_lipschitz(const GridPointSet& pts, const std::vector<double>& f) {
  double lip = 0.0;
  const int N = pts.size();
  for (int a = 0; a < N; ++a) {
    for (int b = a + 1; b < N; ++b) {
      double d = pts.distance(a, b);
      if (d > 0.0) lip = std::max(lip, std::abs(f[a] - f[b]) / d);
    }
  }
  return lip;
}

}  // namespace

HopfLaxReport verify_hopf_lax_properties(const Grid& grid, const GridPointSet& pts,
                                         const std::vector<double>& f,
                                         const std::vector<double>& times, double dt) {
  HopfLaxReport report;
  double h = 0.0;
  for (int e = 0; e < grid.graph().num_edges(); ++e) h = std::max(h, grid.width(e));
  report.grid_h = h;
  report.dt = dt;
  report.lip_f = discrete_lipschitz(pts, f);
  report.delta_hj = 4.0 * report.lip_f * report.lip_f * (h + dt);

  // Interior samples: cell centers with both in-edge neighbours available
  // and distance > 2h from every vertex; the slope estimate is the centred
  // secant along the edge. Point index of cell (e, i) equals its flat index.
  const MetricGraph& g = grid.graph();
  struct Interior {
    int point;
    int prev;
    int next;
    double spacing;
  };
  std::vector<Interior> interior;
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 2; i + 2 < grid.cells(e); ++i) {
      double to_vertex = std::min(grid.cell_center(e, i),
                                  g.edge_length(e) - grid.cell_center(e, i));
      if (to_vertex > 2.0 * h) {
        interior.push_back({grid.flat(e, i), grid.flat(e, i - 1), grid.flat(e, i + 1),
                            2.0 * grid.width(e)});
      }
    }
  }

  for (double t : times) {
    if (t < 0.0) throw Error(ErrorCode::NegativeTime, "negative evaluation time");
    std::vector<double> qt = hopf_lax(pts, f, t);
    double lip_qt = discrete_lipschitz(pts, qt);
    if (report.lip_f > 0.0) {
      report.max_lip_ratio = std::max(report.max_lip_ratio, lip_qt / report.lip_f);
    }

    std::vector<double> q_plus = hopf_lax(pts, f, t + dt);
    std::vector<double> q_minus = hopf_lax(pts, f, std::max(0.0, t - dt));
    const double span = t + dt - std::max(0.0, t - dt);
    for (const Interior& s : interior) {
      double ddt = (q_plus[s.point] - q_minus[s.point]) / span;
      double slope = std::abs(qt[s.next] - qt[s.prev]) / s.spacing;
      report.max_hj_residual =
          std::max(report.max_hj_residual, ddt + 0.5 * slope * slope);
    }
  }
  return report;
}

}  // namespace graphot
