#include "graphot/mkv.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "graphot/errors.hpp"

namespace graphot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GridMeasure MkvState::measure() const {
  GridMeasure mu(grid);
  for (int e = 0; e < grid.graph().num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      mu.at(e, i) = eta[grid.flat(e, i)] * grid.width(e);
    }
  }
  return mu;
}

namespace {

// One-sided trace of rho at the vertex end of an edge, by linear
// extrapolation from the first two cells.
double edge_trace(const Grid& grid, const std::vector<double>& rho, int e, bool at_init) {
  const int n = grid.cells(e);
  if (n == 1) return rho[grid.flat(e, 0)];
  if (at_init) {
    return 1.5 * rho[grid.flat(e, 0)] - 0.5 * rho[grid.flat(e, 1)];
  }
  return 1.5 * rho[grid.flat(e, n - 1)] - 0.5 * rho[grid.flat(e, n - 2)];
}

// grad W[mu] at the interfaces (FluxField layout), from the sampled
// mean-field potential; one-sided at the edge ends using the vertex value.
FluxField mean_field_gradient(const GridMeasure& mu, const InteractionKernel& W) {
  FluxField g(mu.grid);
  if (W.is_zero()) return g;
  GridFunction wmu = mean_field_potential(mu, W);
  const Grid& grid = mu.grid;
  const MetricGraph& graph = grid.graph();
  for (int e = 0; e < graph.num_edges(); ++e) {
    const int n = grid.cells(e);
    const double h = grid.width(e);
    g.at(e, 0) = (wmu.at(e, 0) - wmu.vertex[graph.edge_init(e)]) / (0.5 * h);
    for (int k = 1; k < n; ++k) {
      g.at(e, k) = (wmu.at(e, k) - wmu.at(e, k - 1)) / h;
    }
    g.at(e, n) = (wmu.vertex[graph.edge_term(e)] - wmu.at(e, n - 1)) / (0.5 * h);
  }
  return g;
}

}  // namespace

DissipationReport dissipation(const GridMeasure& mu, const ScalarPotential& V,
                              const InteractionKernel& W) {
  require_probability(mu, "dissipation");
  DissipationReport rep;
  FluxField layout(mu.grid);
  rep.velocity.assign(layout.total(), 0.0);

  if (mu.atom_mass() > 0.0) {
    rep.value = kInf;
    rep.finite = false;
    return rep;
  }
  const Grid& grid = mu.grid;
  const MetricGraph& g = grid.graph();
  if (!grid.same_layout(V.grid())) {
    throw Error(ErrorCode::GridMismatch, "potential sampled on a different grid");
  }

  std::vector<double> rho(grid.num_cells());
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      rho[grid.flat(e, i)] = mu.density(e, i) * std::exp(V.cell(e, i));
    }
  }

  // Discrete continuity of rho across vertices: one-sided traces must agree
  // within 10 h Lip(rho).
  double lip = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int k = 1; k < grid.cells(e); ++k) {
      lip = std::max(lip, std::abs(rho[grid.flat(e, k)] - rho[grid.flat(e, k - 1)]) /
                              grid.width(e));
    }
  }
  double hmax = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) hmax = std::max(hmax, grid.width(e));
  rep.trace_tolerance = 10.0 * hmax * lip;

  std::vector<double> vertex_trace(g.num_vertices(), 0.0);
  for (int w = 0; w < g.num_vertices(); ++w) {
    double lo = kInf, hi = -kInf, sum = 0.0;
    for (auto [e, sign] : g.incident_edges(w)) {
      double t = edge_trace(grid, rho, e, sign > 0);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
      sum += t;
    }
    vertex_trace[w] = sum / static_cast<double>(g.incident_edges(w).size());
    rep.continuity_defect = std::max(rep.continuity_defect, hi - lo);
  }
  if (rep.continuity_defect > rep.trace_tolerance + 1e-14) {
    rep.value = kInf;
    rep.finite = false;
    return rep;
  }

  FluxField gw = mean_field_gradient(mu, W);
  double total = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const int n = grid.cells(e);
    const double h = grid.width(e);
    for (int k = 0; k <= n; ++k) {
      double grad, rbar, weight;
      if (k == 0) {
        grad = (rho[grid.flat(e, 0)] - vertex_trace[g.edge_init(e)]) / (0.5 * h);
        rbar = 0.5 * (rho[grid.flat(e, 0)] + vertex_trace[g.edge_init(e)]);
        weight = 0.5 * h;
      } else if (k == n) {
        grad = (vertex_trace[g.edge_term(e)] - rho[grid.flat(e, n - 1)]) / (0.5 * h);
        rbar = 0.5 * (rho[grid.flat(e, n - 1)] + vertex_trace[g.edge_term(e)]);
        weight = 0.5 * h;
      } else {
        grad = (rho[grid.flat(e, k)] - rho[grid.flat(e, k - 1)]) / h;
        rbar = 0.5 * (rho[grid.flat(e, k)] + rho[grid.flat(e, k - 1)]);
        weight = h;
      }
      double drive = grad + rbar * gw.at(e, k);
      if (rbar <= 0.0) {
        if (std::abs(drive) > 1e-13) {
          rep.value = kInf;
          rep.finite = false;
          return rep;
        }
        continue;
      }
      double w_val = drive / rbar;
      rep.velocity[layout.flat(e, k)] = w_val;
      total += w_val * w_val * rbar * std::exp(-V.face(e, k)) * weight;
    }
  }
  rep.value = total;
  return rep;
}

LinftyBoundReport linfty_bound_check(const GridMeasure& mu, const ScalarPotential& V) {
  LinftyBoundReport rep;
  DissipationReport diss = dissipation(mu, V, InteractionKernel::zero());
  if (!diss.finite) {
    throw Error(ErrorCode::InfiniteDissipation, "I_0(mu) is infinite");
  }
  const Grid& grid = mu.grid;
  const MetricGraph& g = grid.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      rep.max_rho = std::max(rep.max_rho, mu.density(e, i) * std::exp(V.cell(e, i)));
    }
  }
  double c_sob = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    c_sob = std::max(c_sob, 1.0 / g.edge_length(e) + 1.0);
  }
  rep.constant = std::exp(V.sup_norm()) * c_sob;
  rep.sqrt_dissipation = std::sqrt(std::max(0.0, diss.value));
  rep.vacuous = rep.sqrt_dissipation <= 1e-12;
  rep.ratio = rep.vacuous ? 0.0 : rep.max_rho / rep.sqrt_dissipation;
  rep.holds = rep.vacuous || rep.ratio <= rep.constant;
  return rep;
}

// Implicit finite-volume operator: unknowns are rho on cells followed by the
// vertex traces. Diffusion uses two-point fluxes with half-width spacing at
// the edge ends; the interaction drift is upwinded, keeping the matrix an
// M-matrix so positivity survives the solve.
struct MkvSolver::Workspace {
  Eigen::SparseMatrix<double> matrix;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool symmetric = false;
  bool factored = false;
  double dt = -1.0;
};

MkvSolver::MkvSolver(Grid grid, ScalarPotential V, InteractionKernel W)
    : grid_(std::move(grid)), V_(std::move(V)), W_(std::move(W)), ws_(new Workspace),
      last_flux_(new FluxField(grid_)) {
  if (!grid_.same_layout(V_.grid())) {
    throw Error(ErrorCode::GridMismatch, "potential sampled on a different grid");
  }
}

MkvSolver::~MkvSolver() = default;

MkvState MkvSolver::make_state(const GridMeasure& mu0, double time) const {
  require_probability(mu0, "mkv initial state");
  require_atom_free(mu0, "mkv initial state");
  if (!mu0.grid.same_layout(grid_)) {
    throw Error(ErrorCode::GridMismatch, "initial measure on a different grid");
  }
  MkvState st;
  st.grid = grid_;
  st.time = time;
  st.eta.resize(grid_.num_cells());
  for (int e = 0; e < grid_.graph().num_edges(); ++e) {
    for (int i = 0; i < grid_.cells(e); ++i) {
      st.eta[grid_.flat(e, i)] = mu0.density(e, i);
    }
  }
  std::vector<double> rho(grid_.num_cells());
  for (int i = 0; i < grid_.num_cells(); ++i) rho[i] = st.eta[i];
  for (int e = 0; e < grid_.graph().num_edges(); ++e) {
    for (int i = 0; i < grid_.cells(e); ++i) {
      rho[grid_.flat(e, i)] *= std::exp(V_.cell(e, i));
    }
  }
  const MetricGraph& g = grid_.graph();
  st.trace.resize(g.num_vertices());
  for (int w = 0; w < g.num_vertices(); ++w) {
    double sum = 0.0;
    for (auto [e, sign] : g.incident_edges(w)) {
      sum += edge_trace(grid_, rho, e, sign > 0);
    }
    st.trace[w] = sum / static_cast<double>(g.incident_edges(w).size());
  }
  return st;
}

MkvState MkvSolver::step(const MkvState& state, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::NonPositiveDt, "dt = " + std::to_string(dt));
  }
  const Grid& grid = grid_;
  const MetricGraph& g = grid.graph();
  const int N = grid.num_cells();
  const int NV = g.num_vertices();
  const int dof = N + NV;

  FluxField gw(grid);
  const bool with_drift = !W_.is_zero();
  if (with_drift) {
    GridMeasure mu = state.measure();
    gw = mean_field_gradient(mu, W_);
  }

  // Assemble (or reuse) the implicit operator. With drift the matrix depends
  // on the frozen mean field, so it is rebuilt every step.
  const bool rebuild = with_drift || !ws_->factored || ws_->dt != dt;
  if (rebuild) {
    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](int r, int c, double v) { trip.emplace_back(r, c, v); };
    for (int e = 0; e < g.num_edges(); ++e) {
      const int n = grid.cells(e);
      const double h = grid.width(e);
      for (int i = 0; i < n; ++i) {
        int c = grid.flat(e, i);
        add(c, c, std::exp(-V_.cell(e, i)) * h / dt);
      }
      for (int k = 0; k <= n; ++k) {
        // face between DOFs L (lower coordinate) and R
        int L = k == 0 ? N + g.edge_init(e) : grid.flat(e, k - 1);
        int Rv = k == n ? N + g.edge_term(e) : grid.flat(e, k);
        double delta = (k == 0 || k == n) ? 0.5 * h : h;
        double kappa = std::exp(-V_.face(e, k)) / delta;
        add(L, L, kappa);
        add(L, Rv, -kappa);
        add(Rv, Rv, kappa);
        add(Rv, L, -kappa);
        if (with_drift) {
          // mass drift velocity is -g; g < 0 moves mass towards +s, so the
          // upwind density sits on the lower-coordinate side
          double gval = gw.at(e, k);
          double coef = std::exp(-V_.face(e, k)) * gval;
          int up = gval <= 0.0 ? L : Rv;
          // drift flux  -e^{-V} g rho_up  joins the divergence of both cells
          add(L, up, -coef);
          add(Rv, up, coef);
        }
      }
    }
    ws_->matrix = Eigen::SparseMatrix<double>(dof, dof);
    ws_->matrix.setFromTriplets(trip.begin(), trip.end());
    ws_->symmetric = !with_drift;
    if (ws_->symmetric) {
      ws_->ldlt.compute(ws_->matrix);
      if (ws_->ldlt.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularSystem, "implicit operator not factorisable");
      }
    } else {
      ws_->lu.compute(ws_->matrix);
      if (ws_->lu.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularSystem, "implicit operator not factorisable");
      }
    }
    ws_->factored = true;
    ws_->dt = dt;
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dof);
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      int c = grid.flat(e, i);
      rhs[c] = state.eta[c] * grid.width(e) / dt;  // m/dt with eta = rho e^{-V}
    }
  }

  Eigen::VectorXd sol =
      ws_->symmetric ? ws_->ldlt.solve(rhs).eval() : ws_->lu.solve(rhs).eval();

  MkvState out;
  out.grid = grid;
  out.time = state.time + dt;
  out.eta.resize(N);
  out.trace.resize(NV);
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      int c = grid.flat(e, i);
      double rho = sol[c];
      if (rho < 0.0) {
        if (rho < -1e-10) {
          throw Error(ErrorCode::SingularSystem, "implicit step lost positivity");
        }
        rho = 0.0;
      }
      out.eta[c] = rho * std::exp(-V_.cell(e, i));
    }
  }
  for (int w = 0; w < NV; ++w) out.trace[w] = std::max(0.0, sol[N + w]);

  // Flux consistent with the update, for energy bookkeeping.
  FluxField& flux = *last_flux_;
  for (int e = 0; e < g.num_edges(); ++e) {
    const int n = grid.cells(e);
    const double h = grid.width(e);
    for (int k = 0; k <= n; ++k) {
      double L = k == 0 ? sol[N + g.edge_init(e)] : sol[grid.flat(e, k - 1)];
      double Rv = k == n ? sol[N + g.edge_term(e)] : sol[grid.flat(e, k)];
      double delta = (k == 0 || k == n) ? 0.5 * h : h;
      double j = -std::exp(-V_.face(e, k)) * (Rv - L) / delta;
      if (with_drift) {
        double gval = gw.at(e, k);
        double up = gval <= 0.0 ? L : Rv;
        j -= std::exp(-V_.face(e, k)) * up * gval;
      }
      flux.at(e, k) = j;
    }
  }
  return out;
}

MkvState mkv_step(const MkvState& state, const ScalarPotential& V,
                  const InteractionKernel& W, double dt) {
  MkvSolver solver(state.grid, V, W);
  return solver.step(state, dt);
}

SpaceTimePath mkv_solve(const Grid& grid, const GridMeasure& mu0, const ScalarPotential& V,
                        const InteractionKernel& W, double dt, double T, int store_every) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::NonPositiveDt, "dt = " + std::to_string(dt));
  }
  MkvSolver solver(grid, V, W);
  MkvState state = solver.make_state(mu0);
  SpaceTimePath path;
  path.times.push_back(0.0);
  path.measures.push_back(state.measure());

  const int steps = static_cast<int>(std::llround(T / dt));
  FluxField accum(grid);
  int held = 0;
  for (int k = 0; k < steps; ++k) {
    state = solver.step(state, dt);
    for (int f = 0; f < accum.total(); ++f) accum.value[f] += solver.last_flux().value[f];
    ++held;
    if ((k + 1) % store_every == 0 || k + 1 == steps) {
      for (int f = 0; f < accum.total(); ++f) accum.value[f] /= held;
      path.fluxes.push_back(accum);
      path.times.push_back(state.time);
      path.measures.push_back(state.measure());
      accum = FluxField(grid);
      held = 0;
    }
  }
  return path;
}

EnergyDissipationReport energy_dissipation_check(const SpaceTimePath& path,
                                                 const ScalarPotential& V,
                                                 const InteractionKernel& W) {
  if (path.measures.size() < 2) {
    throw Error(ErrorCode::ConfigInvalid, "trajectory needs at least two states");
  }
  EnergyDissipationReport rep;
  rep.free_energy_start = free_energy(path.measures.front(), V, W);
  if (!std::isfinite(rep.free_energy_start)) {
    throw Error(ErrorCode::InfiniteEnergy, "free energy of the initial state is infinite");
  }
  rep.free_energy_end = free_energy(path.measures.back(), V, W);

  // metric speed from the trajectory's own fluxes (midpoint densities)
  for (size_t k = 0; k < path.fluxes.size(); ++k) {
    double dt = path.times[k + 1] - path.times[k];
    GridMeasure mid = path.measures[k];
    for (int i = 0; i < mid.grid.num_cells(); ++i) {
      mid.mass[i] = 0.5 * (path.measures[k].mass[i] + path.measures[k + 1].mass[i]);
    }
    ActionValue a = bb_action(mid, path.fluxes[k]);
    rep.action_integral += dt * a.value;
  }

  // trapezoid rule for the dissipation integral
  std::vector<double> diss(path.measures.size());
  for (size_t k = 0; k < path.measures.size(); ++k) {
    diss[k] = dissipation(path.measures[k], V, W).value;
  }
  for (size_t k = 0; k + 1 < path.measures.size(); ++k) {
    double dt = path.times[k + 1] - path.times[k];
    rep.dissipation_integral += 0.5 * dt * (diss[k] + diss[k + 1]);
  }

  rep.value = rep.free_energy_end - rep.free_energy_start +
              0.5 * (rep.action_integral + rep.dissipation_integral);
  return rep;
}

}  // namespace graphot
