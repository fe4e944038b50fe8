#include "graphot/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace graphot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCoordSlack = 1e-12;  // tolerated overshoot before rejecting a coordinate
}  // namespace

MetricGraph MetricGraph::build(const GraphSpec& spec) {
  MetricGraph g;
  g.vertex_names_ = spec.vertices;

  std::unordered_map<std::string, int> vidx;
  for (int v = 0; v < static_cast<int>(spec.vertices.size()); ++v) {
    if (!vidx.emplace(spec.vertices[v], v).second) {
      throw Error(ErrorCode::ConfigInvalid, "duplicate vertex id '" + spec.vertices[v] + "'");
    }
  }

  std::unordered_set<std::string> edge_ids;
  g.min_edge_length_ = kInf;
  for (const EdgeSpec& e : spec.edges) {
    if (!edge_ids.insert(e.id).second) {
      throw Error(ErrorCode::DuplicateEdgeId, "edge id '" + e.id + "' appears twice");
    }
    auto it_init = vidx.find(e.init);
    auto it_term = vidx.find(e.term);
    if (it_init == vidx.end() || it_term == vidx.end()) {
      throw Error(ErrorCode::ConfigInvalid,
                  "edge '" + e.id + "' references an unknown vertex");
    }
    if (it_init->second == it_term->second) {
      throw Error(ErrorCode::SelfLoop, "edge '" + e.id + "' is a self-loop");
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw Error(ErrorCode::NonPositiveLength,
                  "edge '" + e.id + "' has length " + std::to_string(e.length));
    }
    g.edge_ids_.push_back(e.id);
    g.edge_init_.push_back(it_init->second);
    g.edge_term_.push_back(it_term->second);
    g.edge_length_.push_back(e.length);
    g.min_edge_length_ = std::min(g.min_edge_length_, e.length);
    g.total_length_ += e.length;
  }

  if (g.vertex_names_.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "graph has no vertices");
  }
  if (g.edge_ids_.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "graph has no edges");
  }

  const int n = g.num_vertices();
  g.incidence_.assign(n, {});
  for (int e = 0; e < g.num_edges(); ++e) {
    g.incidence_[g.edge_init_[e]].emplace_back(e, +1);
    g.incidence_[g.edge_term_[e]].emplace_back(e, -1);
  }

  // Connectivity.
  std::vector<char> seen(n, 0);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (auto [e, sign] : g.incidence_[v]) {
      int w = sign > 0 ? g.edge_term_[e] : g.edge_init_[e];
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        bfs.push(w);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorCode::DisconnectedGraph,
                std::to_string(n - reached) + " vertices unreachable from '" +
                    g.vertex_names_[0] + "'");
  }

  // All-pairs vertex distances (Dijkstra per source; fine at desk scale).
  g.vertex_dist_.assign(n, std::vector<double>(n, kInf));
  for (int src = 0; src < n; ++src) {
    auto& dist = g.vertex_dist_[src];
    dist[src] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      for (auto [e, sign] : g.incidence_[v]) {
        int w = sign > 0 ? g.edge_term_[e] : g.edge_init_[e];
        double nd = d + g.edge_length_[e];
        if (nd < dist[w]) {
          dist[w] = nd;
          pq.emplace(nd, w);
        }
      }
    }
  }

  return g;
}

int MetricGraph::vertex_index(const std::string& name) const {
  for (int v = 0; v < num_vertices(); ++v) {
    if (vertex_names_[v] == name) return v;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown vertex '" + name + "'");
}

int MetricGraph::edge_index(const std::string& id) const {
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_ids_[e] == id) return e;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown edge '" + id + "'");
}

std::vector<int> MetricGraph::vertex_path(int u, int v) const {
  // Greedy reconstruction: from u, step to the name-smallest neighbour that
  // stays on a shortest path. This yields the lexicographically smallest
  // shortest vertex sequence.
  std::vector<int> path{u};
  int cur = u;
  while (cur != v) {
    int best = -1;
    double best_len = kInf;
    for (auto [e, sign] : incidence_[cur]) {
      int w = sign > 0 ? edge_term_[e] : edge_init_[e];
      double through = edge_length_[e] + vertex_dist_[w][v];
      if (through > vertex_dist_[cur][v] + 1e-12) continue;
      if (best < 0 || vertex_names_[w] < vertex_names_[best] ||
          (w == best && edge_length_[e] < best_len)) {
        best = w;
        best_len = edge_length_[e];
      }
    }
    if (best < 0) {
      throw Error(ErrorCode::DisconnectedGraph, "no path between vertices");
    }
    path.push_back(best);
    cur = best;
  }
  return path;
}

int MetricGraph::connecting_edge(int u, int v) const {
  int best = -1;
  for (auto [e, sign] : incidence_[u]) {
    int w = sign > 0 ? edge_term_[e] : edge_init_[e];
    if (w != v) continue;
    if (best < 0 || edge_length_[e] < edge_length_[best]) best = e;
  }
  if (best < 0) {
    throw Error(ErrorCode::ConfigInvalid, "vertices not adjacent");
  }
  return best;
}

GraphPoint MetricGraph::vertex_point(int v) const {
  const auto& inc = incidence_[v];
  int e = inc.front().first;
  int sign = inc.front().second;
  for (auto [ei, si] : inc) {
    if (ei < e) {
      e = ei;
      sign = si;
    }
  }
  return GraphPoint{e, sign > 0 ? 0.0 : edge_length_[e]};
}

bool MetricGraph::is_vertex_point(const GraphPoint& p, int* vertex) const {
  if (p.s == 0.0) {
    if (vertex) *vertex = edge_init_[p.edge];
    return true;
  }
  if (p.s == edge_length_[p.edge]) {
    if (vertex) *vertex = edge_term_[p.edge];
    return true;
  }
  return false;
}

void MetricGraph::validate_point(const GraphPoint& p) const {
  if (p.edge < 0 || p.edge >= num_edges()) {
    throw Error(ErrorCode::PointNotOnGraph, "edge index " + std::to_string(p.edge));
  }
  if (!(p.s >= -kCoordSlack && p.s <= edge_length_[p.edge] + kCoordSlack) ||
      !std::isfinite(p.s)) {
    throw Error(ErrorCode::PointNotOnGraph,
                "coordinate " + std::to_string(p.s) + " outside [0, " +
                    std::to_string(edge_length_[p.edge]) + "]");
  }
}

GraphPoint MetricGraph::canonical(GraphPoint p) const {
  validate_point(p);
  if (p.s <= 0.0) {
    return vertex_point(edge_init_[p.edge]);
  }
  if (p.s >= edge_length_[p.edge]) {
    return vertex_point(edge_term_[p.edge]);
  }
  return p;
}

double MetricGraph::distance(const GraphPoint& xin, const GraphPoint& yin) const {
  GraphPoint x = canonical(xin);
  GraphPoint y = canonical(yin);
  double best = kInf;
  if (x.edge == y.edge) {
    best = std::abs(x.s - y.s);
  }
  // Leave x through either endpoint, enter y through either endpoint. For
  // points on a common edge this also covers the around-the-graph route.
  const int xu[2] = {edge_init_[x.edge], edge_term_[x.edge]};
  const double xd[2] = {x.s, edge_length_[x.edge] - x.s};
  const int yu[2] = {edge_init_[y.edge], edge_term_[y.edge]};
  const double yd[2] = {y.s, edge_length_[y.edge] - y.s};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      best = std::min(best, xd[a] + vertex_dist_[xu[a]][yu[b]] + yd[b]);
    }
  }
  return best;
}

namespace {

// Lexicographic comparison of vertex sequences by name.
bool names_less(const MetricGraph& g, const std::vector<int>& a, const std::vector<int>& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    const auto& na = g.vertex_name(a[i]);
    const auto& nb = g.vertex_name(b[i]);
    if (na != nb) return na < nb;
  }
  return a.size() < b.size();
}

}  // namespace

GeodesicPath MetricGraph::geodesic(const GraphPoint& xin, const GraphPoint& yin) const {
  GraphPoint x = canonical(xin);
  GraphPoint y = canonical(yin);

  std::vector<GeodesicPath> cands;

  if (x.edge == y.edge) {
    GeodesicPath direct;
    direct.start = x;
    direct.end = y;
    direct.length = std::abs(x.s - y.s);
    if (direct.length > 0.0) direct.legs.push_back({x.edge, x.s, y.s});
    cands.push_back(std::move(direct));
  }

  const int xu[2] = {edge_init_[x.edge], edge_term_[x.edge]};
  const double xs_end[2] = {0.0, edge_length_[x.edge]};
  const int yu[2] = {edge_init_[y.edge], edge_term_[y.edge]};
  const double ys_end[2] = {0.0, edge_length_[y.edge]};

  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      GeodesicPath cand;
      cand.start = x;
      cand.end = y;
      cand.length = std::abs(x.s - xs_end[a]) + vertex_dist_[xu[a]][yu[b]] +
                    std::abs(y.s - ys_end[b]);
      cand.vertices = vertex_path(xu[a], yu[b]);
      if (x.s != xs_end[a]) cand.legs.push_back({x.edge, x.s, xs_end[a]});
      for (size_t i = 0; i + 1 < cand.vertices.size(); ++i) {
        int e = connecting_edge(cand.vertices[i], cand.vertices[i + 1]);
        if (edge_init_[e] == cand.vertices[i]) {
          cand.legs.push_back({e, 0.0, edge_length_[e]});
        } else {
          cand.legs.push_back({e, edge_length_[e], 0.0});
        }
      }
      if (y.s != ys_end[b]) cand.legs.push_back({y.edge, ys_end[b], y.s});
      cands.push_back(std::move(cand));
    }
  }

  double best_len = kInf;
  for (const auto& c : cands) best_len = std::min(best_len, c.length);
  const double tie = best_len + 1e-12 * (1.0 + best_len);
  const GeodesicPath* best = nullptr;
  for (const auto& c : cands) {
    if (c.length > tie) continue;
    if (!best || names_less(*this, c.vertices, best->vertices)) best = &c;
  }
  return *best;
}

GraphPoint interpolate(const MetricGraph& g, const GeodesicPath& path, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "t = " + std::to_string(t));
  }
  if (path.length == 0.0 || path.legs.empty()) return path.start;
  if (t == 0.0) return path.start;
  if (t == 1.0) return path.end;
  double target = t * path.length;
  double acc = 0.0;
  for (const PathLeg& leg : path.legs) {
    double len = leg.length();
    if (target <= acc + len || &leg == &path.legs.back()) {
      double along = std::clamp(target - acc, 0.0, len);
      double s = leg.s_from < leg.s_to ? leg.s_from + along : leg.s_from - along;
      return g.canonical(GraphPoint{leg.edge, s});
    }
    acc += len;
  }
  return path.end;
}

}  // namespace graphot
