#include "graphot/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "graphot/errors.hpp"

namespace graphot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Spanning-tree basis over m sources and n sinks. Basic arcs are kept as
// (source, sink) pairs with their flows; the tree layout (parent, depth) is
// rebuilt after each pivot, which is cheap at the problem sizes this solver
// is meant for.
struct Basis {
  int m = 0, n = 0;
  std::vector<int> arc_i, arc_j;   // basic arcs
  std::vector<double> arc_flow;
  std::vector<int> parent;         // node -> parent node (-1 at root), nodes: 0..m-1 sources, m..m+n-1 sinks
  std::vector<int> parent_arc;     // node -> index into arc_* for the arc to the parent
  std::vector<int> depth;
  std::vector<double> pot;         // dual potentials per node

  int nodes() const { return m + n; }

  void rebuild_tree() {
    const int N = nodes();
    std::vector<std::vector<std::pair<int, int>>> adj(N);  // (other node, arc idx)
    for (int a = 0; a < static_cast<int>(arc_i.size()); ++a) {
      int s = arc_i[a];
      int t = m + arc_j[a];
      adj[s].push_back({t, a});
      adj[t].push_back({s, a});
    }
    parent.assign(N, -1);
    parent_arc.assign(N, -1);
    depth.assign(N, 0);
    pot.assign(N, 0.0);
    std::vector<int> stack{0};
    std::vector<char> seen(N, 0);
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, a] : adj[v]) {
        if (seen[w]) continue;
        seen[w] = 1;
        parent[w] = v;
        parent_arc[w] = a;
        depth[w] = depth[v] + 1;
        stack.push_back(w);
      }
    }
  }

  void compute_potentials(const std::vector<double>& cost) {
    const int N = nodes();
    // order nodes by increasing depth so parents are resolved first
    std::vector<int> order(N);
    for (int v = 0; v < N; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return depth[a] < depth[b]; });
    for (int v : order) {
      if (parent[v] < 0) {
        pot[v] = 0.0;
        continue;
      }
      int a = parent_arc[v];
      double c = cost[arc_i[a] * static_cast<size_t>(n) + arc_j[a]];
      // u_i + v_j = c_ij on basic arcs
      pot[v] = c - pot[parent[v]];
    }
  }
};

}  // namespace

TransportSolution solve_transport(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::vector<double>& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (m == 0 || n == 0) {
    throw Error(ErrorCode::ConfigInvalid, "empty transportation problem");
  }
  if (cost.size() != static_cast<size_t>(m) * n) {
    throw Error(ErrorCode::ConfigInvalid, "cost matrix size mismatch");
  }

  double cmax = 0.0;
  for (double c : cost) cmax = std::max(cmax, std::abs(c));
  const double price_tol = 1e-11 * (1.0 + cmax);

  Basis basis;
  basis.m = m;
  basis.n = n;

  // Northwest-corner start: always exactly m + n - 1 basic arcs.
  {
    std::vector<double> a = supply, b = demand;
    int i = 0, j = 0;
    while (true) {
      double f = std::min(a[i], b[j]);
      basis.arc_i.push_back(i);
      basis.arc_j.push_back(j);
      basis.arc_flow.push_back(f);
      a[i] -= f;
      b[j] -= f;
      if (i == m - 1 && j == n - 1) break;
      if (i < m - 1 && (a[i] <= b[j] || j == n - 1)) {
        ++i;  // row exhausted (ties advance the row, leaving a degenerate arc)
      } else {
        ++j;
      }
    }
  }

  basis.rebuild_tree();
  basis.compute_potentials(cost);

  std::vector<char> is_basic(static_cast<size_t>(m) * n, 0);
  for (size_t a = 0; a < basis.arc_i.size(); ++a) {
    is_basic[basis.arc_i[a] * static_cast<size_t>(n) + basis.arc_j[a]] = 1;
  }

  const long arc_count = static_cast<long>(m) * n;
  const int block = std::max(64L, static_cast<long>(std::sqrt(static_cast<double>(arc_count))));
  long scan_start = 0;
  int pivots = 0;
  int degenerate_streak = 0;
  const int max_pivots = 200 * (m + n) + 20000;
  bool bland = false;

  std::vector<int> path_arcs;
  path_arcs.reserve(2 * (m + n));

  while (true) {
    // Pricing: best arc in successive blocks (or first negative under Bland).
    long entering = -1;
    double best_rc = -price_tol;
    long scanned = 0;
    long pos = bland ? 0 : scan_start;
    while (scanned < arc_count) {
      long stop = std::min(arc_count, scanned + block);
      for (; scanned < stop; ++scanned, ++pos) {
        if (pos >= arc_count) pos = 0;
        if (is_basic[pos]) continue;
        int i = static_cast<int>(pos / n);
        int j = static_cast<int>(pos % n);
        double rc = cost[pos] - basis.pot[i] - basis.pot[m + j];
        if (rc < best_rc) {
          best_rc = rc;
          entering = pos;
          if (bland) break;
        }
      }
      if (entering >= 0) break;
    }
    if (entering < 0) break;  // optimal
    scan_start = (entering + 1) % arc_count;

    const int ei = static_cast<int>(entering / n);
    const int ej = static_cast<int>(entering % n);

    // Cycle: entering arc plus the tree path between its endpoints. Arcs an
    // even number of steps from the entering arc (along the cycle) gain
    // flow, odd ones lose it.
    int a_node = ei, b_node = m + ej;
    path_arcs.clear();
    std::vector<int> a_side, b_side;
    while (basis.depth[a_node] > basis.depth[b_node]) {
      a_side.push_back(basis.parent_arc[a_node]);
      a_node = basis.parent[a_node];
    }
    while (basis.depth[b_node] > basis.depth[a_node]) {
      b_side.push_back(basis.parent_arc[b_node]);
      b_node = basis.parent[b_node];
    }
    while (a_node != b_node) {
      a_side.push_back(basis.parent_arc[a_node]);
      a_node = basis.parent[a_node];
      b_side.push_back(basis.parent_arc[b_node]);
      b_node = basis.parent[b_node];
    }

    // Walk the cycle starting at the entering arc's source side; the parity
    // of the position tells whether a basic arc loses or gains flow.
    double theta = kInf;
    int leaving = -1;
    auto consider = [&](int arc, bool decreasing) {
      if (!decreasing) return;
      if (basis.arc_flow[arc] < theta - 1e-15) {
        theta = basis.arc_flow[arc];
        leaving = arc;
      }
    };
    // Both walks start on an arc adjacent to the entering arc, which must
    // compensate the pushed flow: even positions decrease, odd increase.
    for (size_t k = 0; k < a_side.size(); ++k) consider(a_side[k], k % 2 == 0);
    for (size_t k = 0; k < b_side.size(); ++k) consider(b_side[k], k % 2 == 0);

    if (leaving < 0) {
      throw Error(ErrorCode::NotConverged, "transportation simplex lost the cycle");
    }
    if (theta < 0.0) theta = 0.0;

    for (size_t k = 0; k < a_side.size(); ++k) {
      basis.arc_flow[a_side[k]] += (k % 2 == 0) ? -theta : theta;
    }
    for (size_t k = 0; k < b_side.size(); ++k) {
      basis.arc_flow[b_side[k]] += (k % 2 == 0) ? -theta : theta;
    }

    // Swap entering and leaving arcs in the basis.
    is_basic[entering] = 1;
    is_basic[basis.arc_i[leaving] * static_cast<size_t>(n) + basis.arc_j[leaving]] = 0;
    basis.arc_i[leaving] = ei;
    basis.arc_j[leaving] = ej;
    basis.arc_flow[leaving] = theta;
    basis.rebuild_tree();
    basis.compute_potentials(cost);

    degenerate_streak = theta <= 1e-15 ? degenerate_streak + 1 : 0;
    if (degenerate_streak > 4 * (m + n)) bland = true;  // anti-cycling fallback

    if (++pivots > max_pivots) {
      throw Error(ErrorCode::NotConverged,
                  "transportation simplex exceeded " + std::to_string(max_pivots) + " pivots");
    }
  }

  TransportSolution out;
  out.pivots = pivots;
  out.u.assign(m, 0.0);
  out.v.assign(n, 0.0);
  for (int i = 0; i < m; ++i) out.u[i] = basis.pot[i];
  for (int j = 0; j < n; ++j) out.v[j] = basis.pot[m + j];
  for (size_t a = 0; a < basis.arc_i.size(); ++a) {
    double f = basis.arc_flow[a];
    if (f > 0.0) {
      out.plan.push_back({basis.arc_i[a], basis.arc_j[a], f});
      out.primal += f * cost[basis.arc_i[a] * static_cast<size_t>(n) + basis.arc_j[a]];
    }
  }
  for (int i = 0; i < m; ++i) out.dual += out.u[i] * supply[i];
  for (int j = 0; j < n; ++j) out.dual += out.v[j] * demand[j];
  return out;
}

}  // namespace graphot
