#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "graphot/extended.hpp"
#include "graphot/functionals.hpp"
#include "graphot/grid.hpp"
#include "graphot/grid_function.hpp"
#include "graphot/piecewise.hpp"
#include "graphot/potential.hpp"
#include "graphot/rng.hpp"
#include "oracles.hpp"

using namespace graphot;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform block of the three-leaf worked example: density 1/(2 eps) on
// [0, eps] of both leaf edges.
GridMeasure star_source(const Grid& grid, double eps) {
  GridMeasure mu(grid);
  const MetricGraph& g = grid.graph();
  for (const char* id : {"e1", "e2"}) {
    int e = g.edge_index(id);
    for (int i = 0; i < grid.cells(e); ++i) {
      if (grid.cell_right(e, i) <= eps + 1e-12) {
        mu.at(e, i) = grid.width(e) / (2.0 * eps);
      }
    }
  }
  return mu;
}

GridMeasure star_target(const Grid& grid, double eps) {
  GridMeasure nu(grid);
  const MetricGraph& g = grid.graph();
  int f = g.edge_index("f");
  for (int i = 0; i < grid.cells(f); ++i) {
    if (grid.cell_left(f, i) >= 1.0 - eps - 1e-12) {
      nu.at(f, i) = grid.width(f) / eps;
    }
  }
  return nu;
}

// Lipschitz test function: graph distance to a fixed point, extended onto
// each auxiliary edge with a chosen slope away from its base vertex.
GridFunction distance_function(const ExtendedGraph& ext, const Grid& ext_grid,
                               const GraphPoint& x0, double aux_slope) {
  const MetricGraph& base = ext.base();
  return GridFunction::sample(ext_grid, [&](int e, double s) {
    if (!ext.is_aux_edge(e)) return base.distance({e, s}, x0);
    int v = ext.aux_vertex_of(e);
    return base.distance(base.vertex_point(v), x0) + aux_slope * s;
  });
}

}  // namespace

TEST_CASE("piecewise-linear integrals agree with quadrature") {
  PiecewiseLinear f{{0.0, 0.3, 1.0, 1.4}, {1.0, -0.5, 2.0, 0.0}};
  PiecewiseLinear g{{0.0, 0.7, 1.4}, {0.5, 1.5, 1.0}};
  auto feval = [&](double t) { return f.evaluate(t); };
  auto geval = [&](double t) { return g.evaluate(t); };

  CHECK(f.integral(0.1, 1.2) ==
        doctest::Approx(oracles::simpson(feval, 0.1, 1.2)).epsilon(1e-9));
  CHECK(integrate_product(f, g, 0.0, 1.4) ==
        doctest::Approx(oracles::simpson([&](double t) { return feval(t) * geval(t); }, 0.0,
                                         1.4)).epsilon(1e-6));

  PiecewiseLinear u{{0.0, 0.5, 1.0}, {0.2, -0.4, 0.3}};
  PiecewiseLinear r{{0.0, 0.5, 1.0}, {1.0, 0.25, 0.8}};
  CHECK(integrate_ratio_square(u, r) ==
        doctest::Approx(oracles::simpson(
                            [&](double t) {
                              double uu = u.evaluate(t);
                              return uu * uu / r.evaluate(t);
                            },
                            0.0, 1.0, 20000))
            .epsilon(1e-7));

  // vanishing density with proportionally vanishing momentum stays finite
  PiecewiseLinear u0{{0.0, 1.0}, {0.0, 0.6}};
  PiecewiseLinear r0{{0.0, 1.0}, {0.0, 1.2}};
  CHECK(integrate_ratio_square(u0, r0) == doctest::Approx(0.6 * 0.6 / 1.2 / 2.0));
  // momentum on a dead zone is infinite
  PiecewiseLinear u1{{0.0, 1.0}, {0.5, 0.5}};
  PiecewiseLinear r1{{0.0, 1.0}, {0.0, 0.0}};
  CHECK(integrate_ratio_square(u1, r1) == kInf);

  // antiderivative integral against nested quadrature
  double direct = f.antiderivative_integral(0.2, 1.3);
  double nested = oracles::simpson(
      [&](double t) { return oracles::simpson(feval, 0.0, t, 512); }, 0.2, 1.3, 512);
  CHECK(direct == doctest::Approx(nested).epsilon(1e-6));
}

TEST_CASE("lebesgue measure") {
  auto star = oracles::three_star();
  Grid grid(star, 0.1);
  GridMeasure leb = lebesgue(grid);
  CHECK(leb.total_mass() == doctest::Approx(3.0).epsilon(1e-14));

  auto iv = oracles::interval();
  Grid g4(iv, 0.25);
  GridMeasure l4 = lebesgue(g4);
  CHECK(g4.num_cells() == 4);
  for (int i = 0; i < 4; ++i) CHECK(l4.at(0, i) == doctest::Approx(0.25));

  GridMeasure prob = leb;
  prob.normalize();
  CHECK(prob.is_probability());
}

TEST_CASE("entropy of uniform and block densities") {
  auto star = oracles::three_star();
  Grid grid(star, 0.01);
  GridMeasure uniform = lebesgue(grid);
  uniform.normalize();
  CHECK(entropy(uniform) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));

  const double eps = 0.1;
  GridMeasure mu = star_source(grid, eps);
  CHECK(mu.is_probability(1e-12));
  CHECK(entropy(mu) == doctest::Approx(std::log(5.0)).epsilon(1e-12));

  GridMeasure nu = star_target(grid, eps);
  CHECK(entropy(nu) == doctest::Approx(std::log(10.0)).epsilon(1e-12));

  GridMeasure atomic(grid);
  atomic.atom[star->vertex_index("c")] = 1.0;
  CHECK(entropy(atomic) == kInf);

  GridMeasure not_prob = lebesgue(grid);
  CHECK_THROWS_AS(entropy(not_prob), Error);
}

TEST_CASE("relative entropy against the weighted measure") {
  auto iv = oracles::interval();
  Grid grid(iv, 0.01);
  auto V = ScalarPotential::sample(grid, [](int, double s) { return s * s - 0.3 * s; });

  GridMeasure uniform = lebesgue(grid);
  uniform.normalize();
  CHECK(relative_entropy(uniform, ScalarPotential::zero(grid)) ==
        doctest::Approx(entropy(uniform)).epsilon(1e-12));

  // Gibbs density e^{-V}/Z has relative entropy -log Z, exactly on the grid.
  auto ref = V.reference_cell_masses();
  double Z = V.reference_total_mass();
  GridMeasure gibbs(grid);
  for (int i = 0; i < grid.num_cells(); ++i) gibbs.mass[i] = ref[i] / Z;
  CHECK(relative_entropy(gibbs, V) == doctest::Approx(-std::log(Z)).epsilon(1e-12));

  // consistency: E_V = Ent + int V dmu for absolutely continuous mu
  GridMeasure mu(grid);
  for (int i = 0; i < grid.num_cells(); ++i) {
    mu.mass[i] = grid.width(0) * (1.0 + 0.5 * std::sin(7.0 * grid.cell_center(0, i)));
  }
  mu.normalize();
  CHECK(relative_entropy(mu, V) ==
        doctest::Approx(entropy(mu) + potential_energy(mu, V)).epsilon(1e-11));

  GridMeasure atomic(grid);
  atomic.atom[0] = 1.0;
  CHECK(relative_entropy(atomic, V) == kInf);
}

TEST_CASE("interaction energy") {
  auto iv = oracles::interval();
  Grid grid(iv, 0.01);
  GridMeasure uniform = lebesgue(grid);
  uniform.normalize();

  CHECK(interaction_energy(uniform, InteractionKernel::zero()) == 0.0);
  CHECK(interaction_energy(uniform, InteractionKernel::constant(3.5)) ==
        doctest::Approx(3.5 / 2.0).epsilon(1e-12));

  // W(x, y) = d(x, y) on the unit interval with uniform mu: (1/2) * 1/3.
  double val = interaction_energy(uniform, InteractionKernel::metric_power(1.0, 1));
  double oracle = 0.0;  // midpoint double integral at a finer resolution
  const int n = 800;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      oracle += std::abs((i + 0.5) / n - (j + 0.5) / n) / (double(n) * n);
    }
  }
  CHECK(val == doctest::Approx(0.5 * oracle).epsilon(2e-3));
  CHECK(val == doctest::Approx(1.0 / 6.0).epsilon(2e-3));

  std::vector<std::vector<double>> bad{{0.0, 1.0}, {2.0, 0.0}};
  GridMeasure two(Grid(iv, 0.5));
  two.at(0, 0) = 0.5;
  two.at(0, 1) = 0.5;
  CHECK_THROWS_AS(interaction_energy(two, InteractionKernel::table(bad)), Error);
}

TEST_CASE("free energy composition and lower bound") {
  auto star = oracles::three_star();
  Grid grid(star, 0.05);
  GridMeasure uniform = lebesgue(grid);
  uniform.normalize();
  auto V0 = ScalarPotential::zero(grid);
  CHECK(free_energy(uniform, V0, InteractionKernel::zero()) ==
        doctest::Approx(-std::log(3.0)).epsilon(1e-12));

  Rng rng(99);
  auto V = ScalarPotential::sample(grid, [](int e, double s) { return 0.4 * s + 0.1 * e; });
  auto W = InteractionKernel::gauss_of_distance(0.7, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    GridMeasure mu(grid);
    for (int i = 0; i < grid.num_cells(); ++i) mu.mass[i] = 0.05 + rng.uniform();
    mu.normalize();
    double f = free_energy(mu, V, W);
    double lower = -std::log(V.reference_total_mass()) + 0.0 / 2.0;  // min W = 0 for gauss amp > 0
    CHECK(f >= lower - 1e-10);
  }
}

TEST_CASE("entropy does not increase under cell coarsening") {
  auto iv = oracles::interval();
  Grid fine(iv, 1.0 / 64.0);
  Grid coarse(iv, 1.0 / 32.0);
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    GridMeasure mu(fine);
    for (int i = 0; i < fine.num_cells(); ++i) mu.mass[i] = 0.01 + rng.uniform();
    mu.normalize();
    GridMeasure avg(coarse);
    for (int i = 0; i < coarse.num_cells(); ++i) {
      avg.mass[i] = mu.mass[2 * i] + mu.mass[2 * i + 1];
    }
    CHECK(entropy(avg) <= entropy(mu) + 1e-12);
  }
}

TEST_CASE("regularisation of a constant function is the constant") {
  auto star = oracles::three_star();
  ExtendedGraph ext(star, 0.1);
  Grid base(star, 0.05);
  Grid egrid = extend_grid(ext, base);
  GridFunction phi(egrid);
  for (double& c : phi.cell) c = 2.5;
  for (double& v : phi.vertex) v = 2.5;
  GridFunction reg = regularize_function(ext, phi);
  for (double c : reg.cell) CHECK(c == doctest::Approx(2.5).epsilon(1e-13));
  for (double v : reg.vertex) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("regularising a linear window multiplies the slope by alpha") {
  auto iv = oracles::interval();
  ExtendedGraph ext(iv, 0.1);
  Grid base(iv, 0.02);
  Grid egrid = extend_grid(ext, base);
  // globally linear in the extended line coordinate of the single edge
  GridFunction phi = GridFunction::sample(egrid, [&](int e, double s) {
    if (e == 0) return s - 0.5;
    int v = ext.aux_vertex_of(e);
    return v == 0 ? -0.5 - s : 0.5 + s;
  });
  const double a = ext.alpha(0);
  for (double s : {0.3, 0.5, 0.62}) {
    CHECK(regularized_value(ext, phi, 0, s) == doctest::Approx(a * (s - 0.5)).epsilon(1e-12));
    CHECK(regularized_gradient(ext, phi, 0, s) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("uniform convergence of the regularised function as eps shrinks") {
  auto star = oracles::three_star();
  GraphPoint x0{star->edge_index("f"), 0.35};
  double prev = kInf;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    ExtendedGraph ext(star, eps);
    Grid base(star, 0.01);
    Grid egrid = extend_grid(ext, base);
    GridFunction phi = distance_function(ext, egrid, x0, 1.0);
    GridFunction reg = regularize_function(ext, phi);
    double err = 0.0;
    for (int e = 0; e < star->num_edges(); ++e) {
      for (int i = 0; i < base.cells(e); ++i) {
        double truth = star->distance({e, base.cell_center(e, i)}, x0);
        err = std::max(err, std::abs(reg.at(e, i) - truth));
      }
    }
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK(prev <= 0.06);
}

TEST_CASE("gradient of the regularisation equals alpha times regularised slope") {
  auto star = oracles::three_star();
  ExtendedGraph ext(star, 0.08);
  Grid base(star, 0.02);
  Grid egrid = extend_grid(ext, base);
  GridFunction phi = distance_function(ext, egrid, {star->edge_index("e2"), 0.3}, 1.0);

  for (int e = 0; e < star->num_edges(); ++e) {
    PiecewiseLinear line = extended_line_profile(ext, phi, e);
    const double a = ext.alpha(e);
    const double eps = ext.epsilon();
    const double half = 0.5 * star->edge_length(e);
    for (int i = 2; i < base.cells(e) - 2; ++i) {
      double s = base.cell_center(e, i);
      double x = s - half;
      // slope route: integrate the piecewise-constant derivative over the window
      double slope_integral = 0.0;
      for (size_t j = 0; j + 1 < line.x.size(); ++j) {
        double lo = std::max(a * x - eps, line.x[j]);
        double hi = std::min(a * x + eps, line.x[j + 1]);
        if (hi > lo) {
          slope_integral +=
              (line.v[j + 1] - line.v[j]) / (line.x[j + 1] - line.x[j]) * (hi - lo);
        }
      }
      double via_slopes = a / (2.0 * eps) * slope_integral;
      CHECK(regularized_gradient(ext, phi, e, s) ==
            doctest::Approx(via_slopes).epsilon(1e-10));
    }
  }
}

TEST_CASE("regularising a vertex atom spreads it over the auxiliary edge") {
  auto star = oracles::three_star();
  const double eps = 0.1;
  ExtendedGraph ext(star, eps);
  Grid base(star, 0.05);
  Grid egrid = extend_grid(ext, base);

  GridMeasure dirac(base);
  int c = star->vertex_index("c");
  dirac.atom[c] = 1.0;
  GridMeasure reg = regularize_measure(ext, egrid, dirac);

  CHECK(reg.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  int aux = ext.aux_edge(c);
  for (int e = 0; e < ext.extended().num_edges(); ++e) {
    for (int i = 0; i < egrid.cells(e); ++i) {
      double expected = (e == aux) ? egrid.width(e) / (2.0 * eps) : 0.0;
      CHECK(reg.at(e, i) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("measure regularisation: mass, density bound, duality") {
  Rng rng(2025);
  auto star = oracles::three_star();
  const double eps = 0.07;
  ExtendedGraph ext(star, eps);
  Grid base(star, 0.02);
  Grid egrid = extend_grid(ext, base);

  for (int trial = 0; trial < 12; ++trial) {
    GridMeasure mu(base);
    for (int i = 0; i < base.num_cells(); ++i) mu.mass[i] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    if (trial % 3 == 0) {
      mu.atom[rng.uniform_int(star->num_vertices())] = 0.5 + rng.uniform();
    }
    mu.normalize();

    GridMeasure reg = regularize_measure(ext, egrid, mu);
    CHECK(std::abs(reg.total_mass() - mu.total_mass()) <= 1e-12);

    double bound = 1.0 / (2.0 * eps) + 0.02;
    for (int e = 0; e < ext.extended().num_edges(); ++e) {
      for (int i = 0; i < egrid.cells(e); ++i) {
        CHECK(reg.at(e, i) / egrid.width(e) <= bound);
      }
    }

    GraphPoint x0 = oracles::random_point(*star, rng);
    GridFunction phi = distance_function(ext, egrid, x0, rng.uniform(-1.0, 1.0));
    double lhs = integrate_against_profiles(egrid, regularized_density(ext, mu), phi);
    double rhs = integrate_regularized_against(ext, phi, mu);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("kinetic energy never increases under regularisation") {
  Rng rng(77);
  auto zoo = oracles::graph_zoo();
  int instances = 0;
  while (instances < 20) {
    const auto& g = zoo[instances % zoo.size()];
    double eps = 0.05 + 0.4 * rng.uniform() * g->min_edge_length() / 2.0;
    if (2.0 * eps >= g->min_edge_length()) continue;
    ExtendedGraph ext(g, eps);
    Grid base(g, g->min_edge_length() / 12.0);

    GridMeasure mu(base);
    for (int i = 0; i < base.num_cells(); ++i) {
      mu.mass[i] = rng.uniform() < 0.25 ? 0.0 : 0.2 + rng.uniform();
    }
    if (instances % 4 == 0) mu.atom[rng.uniform_int(g->num_vertices())] = rng.uniform();
    mu.normalize();

    // momentum density u = v * rho with a random bounded velocity field
    std::vector<double> momentum(base.num_cells(), 0.0);
    for (int e = 0; e < g->num_edges(); ++e) {
      for (int i = 0; i < base.cells(e); ++i) {
        double rho = mu.density(e, i);
        momentum[base.flat(e, i)] = rho > 0.0 ? rng.uniform(-1.5, 1.5) * rho : 0.0;
      }
    }

    KineticEnergyPair pair = kinetic_energy_pair(ext, mu, momentum);
    REQUIRE(std::isfinite(pair.input));
    CHECK(pair.regularized <= pair.input + 1e-8);
    ++instances;
  }
}

TEST_CASE("regularised measures converge weakly") {
  auto star = oracles::three_star();
  Grid base(star, 0.02);
  Rng rng(5);
  GridMeasure mu(base);
  for (int i = 0; i < base.num_cells(); ++i) mu.mass[i] = 0.1 + rng.uniform();
  mu.atom[star->vertex_index("c")] = 0.4;
  mu.normalize();

  std::vector<GraphPoint> dictionary;
  for (int k = 0; k < 5; ++k) dictionary.push_back(oracles::random_point(*star, rng));

  double prev = kInf;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    ExtendedGraph ext(star, eps);
    Grid egrid = extend_grid(ext, base);
    double worst = 0.0;
    for (const GraphPoint& x0 : dictionary) {
      GridFunction phi = distance_function(ext, egrid, x0, 1.0);
      double reg_side = integrate_against_profiles(egrid, regularized_density(ext, mu), phi);
      // exact integral of the same test function against mu itself
      double base_side = 0.0;
      for (int e = 0; e < star->num_edges(); ++e) {
        PiecewiseLinear prof = phi.edge_profile(e);
        for (int i = 0; i < base.cells(e); ++i) {
          if (mu.at(e, i) != 0.0) {
            base_side += mu.density(e, i) *
                         prof.integral(base.cell_left(e, i), base.cell_right(e, i));
          }
        }
      }
      for (int v = 0; v < star->num_vertices(); ++v) {
        if (mu.atom[v] != 0.0) {
          GraphPoint vp = star->vertex_point(v);
          base_side += mu.atom[v] * phi.evaluate(vp.edge, vp.s);
        }
      }
      worst = std::max(worst, std::abs(reg_side - base_side));
    }
    CHECK(worst <= 3.0 * eps);
    CHECK(worst <= prev + 1e-12);
    prev = worst;
  }
}

TEST_CASE("epsilon must leave room inside the shortest edge") {
  auto star = oracles::three_star();
  CHECK_THROWS_AS(ExtendedGraph(star, 0.5), Error);
  CHECK_NOTHROW(ExtendedGraph(star, 0.49));
}
