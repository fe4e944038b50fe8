#include "graphot/dynamics.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

#include "graphot/errors.hpp"
#include "graphot/rng.hpp"
#include "graphot/transport.hpp"
#include "prox_util.hpp"

namespace graphot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FluxField::FluxField(Grid g) : grid(std::move(g)) {
  const int m = grid.graph().num_edges();
  offset_.resize(m);
  int total = 0;
  for (int e = 0; e < m; ++e) {
    offset_[e] = total;
    total += grid.cells(e) + 1;
  }
  value.assign(total, 0.0);
}

namespace {

struct InterfaceInfo {
  int edge = 0;
  int k = 0;          // interface index within the edge
  double weight = 0;  // control volume
  std::vector<std::pair<int, double>> rho;  // (flat cell, coefficient)
};

// Interface control volumes and the density-averaging stencils: interior
// interfaces average their two cells; vertex interfaces average all boundary
// cells meeting at the vertex, so every incident edge end sees the same
// density value.
std::vector<InterfaceInfo> build_interfaces(const Grid& grid) {
  const MetricGraph& g = grid.graph();
  std::vector<InterfaceInfo> out;
  for (int e = 0; e < g.num_edges(); ++e) {
    const int n = grid.cells(e);
    const double h = grid.width(e);
    for (int k = 0; k <= n; ++k) {
      InterfaceInfo info;
      info.edge = e;
      info.k = k;
      if (k > 0 && k < n) {
        info.weight = h;
        info.rho = {{grid.flat(e, k - 1), 0.5}, {grid.flat(e, k), 0.5}};
      } else {
        info.weight = 0.5 * h;
        int w = k == 0 ? g.edge_init(e) : g.edge_term(e);
        const auto& inc = g.incident_edges(w);
        double coef = 1.0 / static_cast<double>(inc.size());
        for (auto [e2, sign] : inc) {
          int cell = sign > 0 ? grid.flat(e2, 0) : grid.flat(e2, grid.cells(e2) - 1);
          info.rho.push_back({cell, coef});
        }
      }
      out.push_back(std::move(info));
    }
  }
  return out;
}

}  // namespace

ContinuityReport check_continuity_weighted(const SpaceTimePath& path,
                                           const std::vector<double>& edge_weight) {
  if (path.measures.size() < 2 || path.fluxes.size() + 1 != path.measures.size()) {
    throw Error(ErrorCode::ConfigInvalid, "path needs K+1 measures and K fluxes");
  }
  const Grid& grid = path.measures.front().grid;
  const MetricGraph& g = grid.graph();
  ContinuityReport rep;
  for (const GridMeasure& mu : path.measures) {
    require_atom_free(mu, "check_continuity");
    if (!mu.grid.same_layout(grid)) {
      throw Error(ErrorCode::GridMismatch, "path measures live on different grids");
    }
  }
  for (size_t k = 0; k < path.fluxes.size(); ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    const GridMeasure& a = path.measures[k];
    const GridMeasure& b = path.measures[k + 1];
    const FluxField& U = path.fluxes[k];
    for (int e = 0; e < g.num_edges(); ++e) {
      for (int i = 0; i < grid.cells(e); ++i) {
        double r = b.at(e, i) - a.at(e, i) +
                   dt * edge_weight[e] * (U.at(e, i + 1) - U.at(e, i));
        rep.cell_max = std::max(rep.cell_max, std::abs(r));
        rep.cell_l1 += std::abs(r);
      }
    }
    for (int w = 0; w < g.num_vertices(); ++w) {
      double balance = 0.0;
      for (auto [e, sign] : g.incident_edges(w)) {
        balance += sign > 0 ? U.at(e, 0) : -U.at(e, grid.cells(e));
      }
      rep.vertex_max = std::max(rep.vertex_max, std::abs(balance));
      rep.vertex_l1 += std::abs(balance);
    }
  }
  return rep;
}

ContinuityReport check_continuity(const SpaceTimePath& path) {
  std::vector<double> ones(path.measures.front().grid.graph().num_edges(), 1.0);
  return check_continuity_weighted(path, ones);
}

ActionValue bb_action(const GridMeasure& mu, const FluxField& flux) {
  if (!mu.grid.same_layout(flux.grid)) {
    throw Error(ErrorCode::GridMismatch, "flux lives on a different grid");
  }
  require_atom_free(mu, "bb_action");
  for (double m : mu.mass) {
    if (m < 0.0) return {kInf, false};
  }
  const Grid& grid = mu.grid;
  auto interfaces = build_interfaces(grid);
  double total = 0.0;
  std::vector<double> density(grid.num_cells());
  for (int e = 0; e < grid.graph().num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      density[grid.flat(e, i)] = mu.at(e, i) / grid.width(e);
    }
  }
  for (const InterfaceInfo& info : interfaces) {
    double s = 0.0;
    for (auto [cell, coef] : info.rho) s += coef * density[cell];
    double u = flux.at(info.edge, info.k);
    if (s > 0.0) {
      total += info.weight * u * u / s;
    } else if (u != 0.0) {
      return {kInf, false};
    }
  }
  return {total, true};
}


BBSolution solve_bb(const Grid& grid, const GridMeasure& mu0, const GridMeasure& mu1,
                    int time_steps, const BBSolveParams& params) {
  require_probability(mu0, "solve_bb");
  require_probability(mu1, "solve_bb");
  require_atom_free(mu0, "solve_bb");
  require_atom_free(mu1, "solve_bb");
  if (!mu0.grid.same_layout(grid) || !mu1.grid.same_layout(grid)) {
    throw Error(ErrorCode::GridMismatch, "endpoint measures must share the solver grid");
  }
  if (time_steps < 1) {
    throw Error(ErrorCode::ConfigInvalid, "need at least one time step");
  }

  const MetricGraph& g = grid.graph();
  const int N = grid.num_cells();
  const int K = time_steps;
  const double dt = 1.0 / K;
  auto interfaces = build_interfaces(grid);
  const int F = static_cast<int>(interfaces.size());
  FluxField layout(grid);  // for interface flat indices

  const int n_rho = (K + 1) * N;
  const int n_flux = K * F;
  const int Z = n_rho + n_flux;
  auto rho_idx = [&](int k, int c) { return k * N + c; };
  auto flux_idx = [&](int k, int f) { return n_rho + k * F + f; };

  std::vector<double> cell_width(N);
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) cell_width[grid.flat(e, i)] = grid.width(e);
  }

  // Constraint matrix: continuity, Kirchhoff (one redundant row dropped),
  // pinned endpoint densities.
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> rhs;
  int row = 0;
  for (int k = 0; k < K; ++k) {
    for (int e = 0; e < g.num_edges(); ++e) {
      for (int i = 0; i < grid.cells(e); ++i) {
        int c = grid.flat(e, i);
        trip.emplace_back(row, rho_idx(k + 1, c), cell_width[c]);
        trip.emplace_back(row, rho_idx(k, c), -cell_width[c]);
        trip.emplace_back(row, flux_idx(k, layout.flat(e, i + 1)), dt);
        trip.emplace_back(row, flux_idx(k, layout.flat(e, i)), -dt);
        rhs.push_back(0.0);
        ++row;
      }
    }
  }
  for (int k = 0; k < K; ++k) {
    for (int w = 0; w < g.num_vertices(); ++w) {
      if (k == K - 1 && w == g.num_vertices() - 1) continue;  // dependent row
      for (auto [e, sign] : g.incident_edges(w)) {
        int f = sign > 0 ? layout.flat(e, 0) : layout.flat(e, grid.cells(e));
        trip.emplace_back(row, flux_idx(k, f), sign > 0 ? 1.0 : -1.0);
      }
      rhs.push_back(0.0);
      ++row;
    }
  }
  for (int c = 0; c < N; ++c) {
    trip.emplace_back(row, rho_idx(0, c), 1.0);
    rhs.push_back(mu0.mass[c] / cell_width[c]);
    ++row;
  }
  for (int c = 0; c < N; ++c) {
    trip.emplace_back(row, rho_idx(K, c), 1.0);
    rhs.push_back(mu1.mass[c] / cell_width[c]);
    ++row;
  }
  const int R = row;

  Eigen::SparseMatrix<double> B(R, Z);
  B.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> Bt = B.transpose();
  Eigen::SparseMatrix<double> M = B * Bt;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(M);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "constraint projection factorisation failed");
  }
  Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), R);

  // Interpolation onto centered (density, flux) pairs at half-steps: space
  // stencil from the interface scheme, time average of the two levels.
  std::vector<Eigen::Triplet<double>> strip;
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) {
      const InterfaceInfo& info = interfaces[f];
      for (auto [cell, coef] : info.rho) {
        strip.emplace_back(k * F + f, rho_idx(k, cell), 0.5 * coef);
        strip.emplace_back(k * F + f, rho_idx(k + 1, cell), 0.5 * coef);
      }
    }
  }
  Eigen::SparseMatrix<double> S(K * F, n_rho);
  S.setFromTriplets(strip.begin(), strip.end());
  Eigen::SparseMatrix<double> St = S.transpose();

  // Power iteration for the dualised operator norm.
  double L2 = 1.0;
  {
    Rng rng(1234);
    Eigen::VectorXd v(n_rho);
    for (int i = 0; i < n_rho; ++i) v[i] = rng.uniform(-1.0, 1.0);
    v.normalize();
    for (int it = 0; it < params.power_iterations; ++it) {
      Eigen::VectorXd w = St * (S * v);
      double nrm = w.norm();
      if (nrm <= 0.0) break;
      v = w / nrm;
      L2 = nrm;
    }
  }
  const double L = std::sqrt(std::max(L2, 1.0));
  const double ratio = std::sqrt(params.step_ratio);
  const double sigma = 0.95 * ratio / L;
  const double tau = 0.95 / (ratio * L);

  std::vector<double> weight(K * F);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < F; ++f) weight[k * F + f] = interfaces[f].weight * dt;
  }

  // Warm start: displacement interpolation of the static plan, with fluxes
  // filled in by the constraint projection. Falls back to the linear
  // interpolation of the endpoints if the static solve fails.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(Z);
  bool warm = false;
  try {
    WassersteinResult st = wasserstein(g, SupportCloud::from_measure(mu0),
                                       SupportCloud::from_measure(mu1), 2);
    InterpolationContext ctx = prepare_interpolation(g, st.plan);
    for (int k = 0; k <= K; ++k) {
      double t = static_cast<double>(k) / K;
      GridMeasure mk = geodesic_interpolation(g, grid, st.plan, ctx, t);
      // fold any vertex hits into a neighbouring cell; this is only a start
      for (int v = 0; v < g.num_vertices(); ++v) {
        if (mk.atom[v] != 0.0) {
          auto [e, sign] = g.incident_edges(v).front();
          int cell = sign > 0 ? grid.flat(e, 0) : grid.flat(e, grid.cells(e) - 1);
          mk.mass[cell] += mk.atom[v];
          mk.atom[v] = 0.0;
        }
      }
      for (int c = 0; c < N; ++c) z[rho_idx(k, c)] = mk.mass[c] / cell_width[c];
    }
    warm = true;
  } catch (const Error&) {
    warm = false;
  }
  if (!warm) {
    for (int k = 0; k <= K; ++k) {
      double tfrac = static_cast<double>(k) / K;
      for (int c = 0; c < N; ++c) {
        z[rho_idx(k, c)] =
            ((1.0 - tfrac) * mu0.mass[c] + tfrac * mu1.mass[c]) / cell_width[c];
      }
    }
  }

  auto project = [&](Eigen::VectorXd& x) {
    Eigen::VectorXd r = B * x - b;
    Eigen::VectorXd y = solver.solve(r);
    x -= Bt * y;
  };
  project(z);

  Eigen::VectorXd y_s = Eigen::VectorXd::Zero(K * F);
  Eigen::VectorXd y_u = Eigen::VectorXd::Zero(K * F);

  auto centered_action = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd s = S * x.head(n_rho);
    double a = 0.0;
    for (int j = 0; j < K * F; ++j) {
      a += weight[j] * detail::safe_alpha(s[j], x[n_rho + j]);
    }
    return a;
  };

  BBSolution out;
  const double rho_relax = params.relaxation;
  double prev_action = centered_action(z);
  int stable_checks = 0;
  int iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    // primal descent with exact projection onto the continuity constraints
    Eigen::VectorXd z_new = z;
    z_new.head(n_rho) -= tau * (St * y_s);
    z_new.tail(n_flux) -= tau * y_u;
    project(z_new);

    // dual ascent on the perspective function (Moreau), extrapolated primal
    Eigen::VectorXd z_bar = 2.0 * z_new - z;
    Eigen::VectorXd s_bar = S * z_bar.head(n_rho);
    for (int j = 0; j < K * F; ++j) {
      double ws = y_s[j] + sigma * s_bar[j];
      double wu = y_u[j] + sigma * z_bar[n_rho + j];
      double ps, pu;
      detail::prox_alpha(ws / sigma, wu / sigma, weight[j] / sigma, &ps, &pu);
      ws -= sigma * ps;
      wu -= sigma * pu;
      y_s[j] += rho_relax * (ws - y_s[j]);
      y_u[j] += rho_relax * (wu - y_u[j]);
    }
    z += rho_relax * (z_new - z);

    if ((iter + 1) % params.check_every == 0) {
      double action = centered_action(z);
      double delta = std::abs(action - prev_action);
      prev_action = action;
      if (delta <= params.action_tol * (1.0 + std::abs(action))) {
        if (++stable_checks >= 3) {
          ++iter;
          break;
        }
      } else {
        stable_checks = 0;
      }
    }
  }

  Eigen::VectorXd resid = B * z - b;
  out.continuity_residual = resid.lpNorm<Eigen::Infinity>();
  out.converged = stable_checks >= 3 && out.continuity_residual <= params.continuity_tol;
  if (!out.converged && params.throw_on_cap) {
    throw Error(ErrorCode::NotConverged,
                "bb solver: residual " + std::to_string(out.continuity_residual) +
                    " after " + std::to_string(iter) + " iterations");
  }

  out.iterations = iter;
  out.action = centered_action(z);
  out.path.times.resize(K + 1);
  for (int k = 0; k <= K; ++k) {
    out.path.times[k] = static_cast<double>(k) / K;
    GridMeasure mu(grid);
    for (int c = 0; c < N; ++c) mu.mass[c] = z[rho_idx(k, c)] * cell_width[c];
    out.path.measures.push_back(std::move(mu));
  }
  for (int k = 0; k < K; ++k) {
    FluxField U(grid);
    for (int f = 0; f < F; ++f) U.value[f] = z[flux_idx(k, f)];
    out.path.fluxes.push_back(std::move(U));
  }
  return out;
}

SpaceTimePath regularize_path(const ExtendedGraph& ext, const Grid& ext_grid,
                              const SpaceTimePath& path) {
  SpaceTimePath out;
  out.times = path.times;
  for (const GridMeasure& mu : path.measures) {
    require_atom_free(mu, "regularize_path");
    out.measures.push_back(regularize_measure(ext, ext_grid, mu));
  }
  const Grid& base_grid = path.measures.front().grid;
  const MetricGraph& base = ext.base();
  const double eps = ext.epsilon();
  for (const FluxField& U : path.fluxes) {
    // The staggered flux is read as the piecewise-linear momentum density
    // with nodes at the interfaces; its kernel average is evaluated exactly.
    // Init-side identifications reverse the direction, hence the sign flip.
    std::vector<PiecewiseLinear> profile(ext.base_edges());
    for (int e = 0; e < ext.base_edges(); ++e) {
      PiecewiseLinear& f = profile[e];
      const double h = base_grid.width(e);
      for (int k = 0; k <= base_grid.cells(e); ++k) {
        f.x.push_back(k * h);
        f.v.push_back(U.at(e, k));
      }
    }
    FluxField reg(ext_grid);
    for (int e = 0; e < ext.base_edges(); ++e) {
      const double half = 0.5 * base.edge_length(e);
      const double a = ext.alpha(e);
      for (int k = 0; k <= ext_grid.cells(e); ++k) {
        const double z = k * ext_grid.width(e) - half;
        const double lo = std::max((z - eps) / a, -half);
        const double hi = std::min((z + eps) / a, half);
        reg.at(e, k) = profile[e].integral(lo + half, hi + half) / (2.0 * eps);
      }
    }
    for (int v = 0; v < ext.base_vertices(); ++v) {
      const int aux = ext.aux_edge(v);
      for (int k = 0; k <= ext_grid.cells(aux); ++k) {
        const double x = k * ext_grid.width(aux);
        double val = 0.0;
        for (auto [e, sign] : base.incident_edges(v)) {
          const double half = 0.5 * base.edge_length(e);
          const double a = ext.alpha(e);
          if (sign < 0) {  // v is the term vertex of e
            const double z = half + x;
            const double lo = std::max((z - eps) / a, -half);
            val += profile[e].integral(lo + half, 2.0 * half);
          } else {
            const double z = -half - x;
            const double hi = std::min((z + eps) / a, half);
            val -= profile[e].integral(0.0, hi + half);
          }
        }
        reg.at(aux, k) = val / (2.0 * eps);
      }
    }
    out.fluxes.push_back(std::move(reg));
  }
  return out;
}

}  // namespace graphot
