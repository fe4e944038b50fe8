#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "graphot/graph.hpp"
#include "graphot/rng.hpp"
#include "oracles.hpp"

using namespace graphot;

namespace {

bool fails_with(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("build validates the three-star and rejects bad specs") {
  auto star = oracles::three_star();
  CHECK(star->num_vertices() == 4);
  CHECK(star->num_edges() == 3);

  GraphSpec single;
  single.vertices = {"u", "v"};
  single.edges = {{"e", "u", "v", 1.0}};
  CHECK_NOTHROW(MetricGraph::build(single));

  GraphSpec disconnected;
  disconnected.vertices = {"u", "v", "p", "q"};
  disconnected.edges = {{"e", "u", "v", 1.0}, {"f", "p", "q", 1.0}};
  CHECK(fails_with(ErrorCode::DisconnectedGraph, [&] { MetricGraph::build(disconnected); }));

  GraphSpec loop;
  loop.vertices = {"u"};
  loop.edges = {{"e", "u", "u", 1.0}};
  CHECK(fails_with(ErrorCode::SelfLoop, [&] { MetricGraph::build(loop); }));

  GraphSpec neg;
  neg.vertices = {"u", "v"};
  neg.edges = {{"e", "u", "v", -0.2}};
  CHECK(fails_with(ErrorCode::NonPositiveLength, [&] { MetricGraph::build(neg); }));

  GraphSpec dup;
  dup.vertices = {"u", "v"};
  dup.edges = {{"e", "u", "v", 1.0}, {"e", "v", "u", 2.0}};
  CHECK(fails_with(ErrorCode::DuplicateEdgeId, [&] { MetricGraph::build(dup); }));
}

TEST_CASE("distance on the three-star") {
  auto star = oracles::three_star();
  int e1 = star->edge_index("e1");
  int e2 = star->edge_index("e2");
  int f = star->edge_index("f");

  // leaf-to-leaf through the center; e1, e2 run leaf -> center
  GraphPoint x{e1, 0.3}, y{e2, 0.4};
  CHECK(star->distance(x, y) == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(star->distance(x, y) == doctest::Approx(oracles::brute_distance(*star, x, y)));

  CHECK(star->distance(x, x) == 0.0);

  const double eps = 0.1;
  for (double x0 : {0.0, 0.04, eps}) {
    GraphPoint from{e1, x0}, to{f, 1.0 - eps + x0};
    CHECK(star->distance(from, to) == doctest::Approx(2.0 - eps).epsilon(1e-14));
  }
}

TEST_CASE("geodesics and tie-breaking") {
  auto iv = oracles::interval();
  GeodesicPath p = iv->geodesic({0, 0.2}, {0, 0.9});
  CHECK(p.length == doctest::Approx(0.7));
  CHECK(p.vertices.empty());

  auto star = oracles::three_star();
  GeodesicPath q =
      star->geodesic({star->edge_index("e1"), 0.5}, {star->edge_index("f"), 0.5});
  CHECK(q.length == doctest::Approx(1.0));
  REQUIRE(q.vertices.size() == 1);
  CHECK(star->vertex_name(q.vertices[0]) == "c");

  GraphSpec tri;
  tri.vertices = {"u", "v", "w"};
  tri.edges = {{"uv", "u", "v", 3.0}, {"uw", "u", "w", 1.0}, {"wv", "w", "v", 1.0}};
  MetricGraph g = MetricGraph::build(tri);
  GeodesicPath r = g.geodesic(g.vertex_point(g.vertex_index("u")),
                              g.vertex_point(g.vertex_index("v")));
  CHECK(r.length == doctest::Approx(2.0));
  REQUIRE(r.vertices.size() == 3);  // u -> w -> v beats the direct edge
  CHECK(g.vertex_name(r.vertices[1]) == "w");
}

TEST_CASE("interpolation along a star geodesic") {
  auto star = oracles::three_star();
  int e1 = star->edge_index("e1");
  int f = star->edge_index("f");
  const double eps = 0.1;
  GeodesicPath p = star->geodesic({e1, 0.0}, {f, 1.0 - eps});
  CHECK(p.length == doctest::Approx(2.0 - eps));

  CHECK(interpolate(*star, p, 0.0) == p.start);
  CHECK(interpolate(*star, p, 1.0) == p.end);

  GraphPoint mid = interpolate(*star, p, 0.5);  // arc position 0.95 stays on e1
  CHECK(mid.edge == e1);
  CHECK(mid.s == doctest::Approx(0.95).epsilon(1e-14));

  CHECK(fails_with(ErrorCode::ParameterOutOfRange,
                   [&] { interpolate(*star, p, 1.5); }));
}

TEST_CASE("metric axioms and oracle agreement on the graph zoo") {
  Rng rng(20240811);
  for (const auto& g : oracles::graph_zoo()) {
    for (int trial = 0; trial < 60; ++trial) {
      GraphPoint x = oracles::random_point(*g, rng);
      GraphPoint y = oracles::random_point(*g, rng);
      GraphPoint z = oracles::random_point(*g, rng);
      double dxy = g->distance(x, y);
      double dyx = g->distance(y, x);
      double dxz = g->distance(x, z);
      double dyz = g->distance(y, z);
      CHECK(dxy >= 0.0);
      CHECK(std::abs(dxy - dyx) <= 1e-12);
      CHECK(dxz <= dxy + dyz + 1e-12);
      CHECK(std::abs(dxy - oracles::brute_distance(*g, x, y)) <= 1e-12);
      if (x == y) CHECK(dxy == 0.0);
      if (dxy == 0.0) CHECK(x == y);

      GeodesicPath p = g->geodesic(x, y);
      CHECK(std::abs(p.length - dxy) <= 1e-12);
      double leg_total = 0.0;
      for (const auto& leg : p.legs) leg_total += leg.length();
      CHECK(leg_total == doctest::Approx(p.length).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpolate is an isometry in arc length") {
  Rng rng(7);
  for (const auto& g : oracles::graph_zoo()) {
    for (int trial = 0; trial < 25; ++trial) {
      GraphPoint x = oracles::random_point(*g, rng);
      GraphPoint y = oracles::random_point(*g, rng);
      GeodesicPath p = g->geodesic(x, y);
      double t0 = rng.uniform();
      double t1 = rng.uniform();
      GraphPoint a = interpolate(*g, p, t0);
      GraphPoint b = interpolate(*g, p, t1);
      CHECK(g->distance(a, b) ==
            doctest::Approx(std::abs(t0 - t1) * p.length).epsilon(1e-10));
    }
  }
}
