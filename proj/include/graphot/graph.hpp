#pragma once

#include <string>
#include <vector>

#include "graphot/errors.hpp"

namespace graphot {

// Input description of a metric graph; validated by MetricGraph::build.
struct EdgeSpec {
  std::string id;
  std::string init;
  std::string term;
  double length = 0.0;
};

struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
};

// Location on the metric graph: edge index plus arclength coordinate
// s in [0, length], with s = 0 at the init vertex. Points that coincide
// with a vertex are stored in canonical form (lowest incident edge index,
// matching endpoint) so equality is decidable.
struct GraphPoint {
  int edge = 0;
  double s = 0.0;

  friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
    return a.edge == b.edge && a.s == b.s;
  }
};

// One traversed segment of a geodesic: edge index and the coordinate range
// covered; s_from > s_to means the edge is traversed against its
// parametrisation.
struct PathLeg {
  int edge = 0;
  double s_from = 0.0;
  double s_to = 0.0;

  double length() const { return s_from < s_to ? s_to - s_from : s_from - s_to; }
};

struct GeodesicPath {
  GraphPoint start;
  GraphPoint end;
  std::vector<int> vertices;  // interior vertex sequence, in traversal order
  double length = 0.0;
  std::vector<PathLeg> legs;
};

// Immutable metric graph: finite, connected, oriented edges with positive
// lengths. Self-loops are rejected; parallel edges are allowed. All-pairs
// vertex distances are precomputed at construction, so point-to-point
// distance queries are O(1) afterwards.
class MetricGraph {
 public:
  static MetricGraph build(const GraphSpec& spec);

  int num_vertices() const { return static_cast<int>(vertex_names_.size()); }
  int num_edges() const { return static_cast<int>(edge_ids_.size()); }

  const std::string& vertex_name(int v) const { return vertex_names_[v]; }
  const std::string& edge_id(int e) const { return edge_ids_[e]; }
  int vertex_index(const std::string& name) const;
  int edge_index(const std::string& id) const;

  int edge_init(int e) const { return edge_init_[e]; }
  int edge_term(int e) const { return edge_term_[e]; }
  double edge_length(int e) const { return edge_length_[e]; }
  double min_edge_length() const { return min_edge_length_; }
  double total_length() const { return total_length_; }

  // (edge index, incidence sign) pairs for the edges meeting vertex v;
  // sign is +1 when v is the init vertex and -1 when it is the term vertex.
  const std::vector<std::pair<int, int>>& incident_edges(int v) const {
    return incidence_[v];
  }

  double vertex_distance(int u, int v) const { return vertex_dist_[u][v]; }

  // Lexicographically smallest (by vertex name) shortest vertex sequence
  // from u to v, inclusive of both endpoints.
  std::vector<int> vertex_path(int u, int v) const;

  // Shortest edge joining two adjacent vertices (ties: lowest edge index).
  int connecting_edge(int u, int v) const;

  GraphPoint canonical(GraphPoint p) const;
  GraphPoint vertex_point(int v) const;
  bool is_vertex_point(const GraphPoint& p, int* vertex = nullptr) const;

  double distance(const GraphPoint& x, const GraphPoint& y) const;
  GeodesicPath geodesic(const GraphPoint& x, const GraphPoint& y) const;

 private:
  MetricGraph() = default;

  void validate_point(const GraphPoint& p) const;

  std::vector<std::string> vertex_names_;
  std::vector<std::string> edge_ids_;
  std::vector<int> edge_init_;
  std::vector<int> edge_term_;
  std::vector<double> edge_length_;
  std::vector<std::vector<std::pair<int, int>>> incidence_;
  std::vector<std::vector<double>> vertex_dist_;
  double min_edge_length_ = 0.0;
  double total_length_ = 0.0;
};

// Point at arc length fraction t in [0,1] along the path.
GraphPoint interpolate(const MetricGraph& g, const GeodesicPath& path, double t);

}  // namespace graphot
