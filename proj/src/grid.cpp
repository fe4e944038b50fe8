#include "graphot/grid.hpp"

#include <cmath>

#include "graphot/errors.hpp"

namespace graphot {

Grid::Grid(std::shared_ptr<const MetricGraph> graph, double target_width)
    : graph_(std::move(graph)) {
  if (!(target_width > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "grid width must be positive");
  }
  const int m = graph_->num_edges();
  cells_.resize(m);
  for (int e = 0; e < m; ++e) {
    cells_[e] = std::max(1, static_cast<int>(std::llround(graph_->edge_length(e) / target_width)));
  }
  finish();
}

Grid::Grid(std::shared_ptr<const MetricGraph> graph, std::vector<int> cells_per_edge)
    : graph_(std::move(graph)), cells_(std::move(cells_per_edge)) {
  if (static_cast<int>(cells_.size()) != graph_->num_edges()) {
    throw Error(ErrorCode::ConfigInvalid, "cell count list does not match edge count");
  }
  for (int n : cells_) {
    if (n < 1) throw Error(ErrorCode::ConfigInvalid, "each edge needs at least one cell");
  }
  finish();
}

void Grid::finish() {
  const int m = graph_->num_edges();
  width_.resize(m);
  offset_.resize(m);
  total_cells_ = 0;
  for (int e = 0; e < m; ++e) {
    width_[e] = graph_->edge_length(e) / cells_[e];
    offset_[e] = total_cells_;
    total_cells_ += cells_[e];
  }
}

double GridMeasure::total_mass() const {
  double t = 0.0;
  for (double m : mass) t += m;
  for (double a : atom) t += a;
  return t;
}

double GridMeasure::atom_mass() const {
  double t = 0.0;
  for (double a : atom) t += a;
  return t;
}

bool GridMeasure::is_probability(double tol) const {
  for (double m : mass) {
    if (m < -tol) return false;
  }
  for (double a : atom) {
    if (a < -tol) return false;
  }
  return std::abs(total_mass() - 1.0) <= tol;
}

void GridMeasure::normalize() {
  double t = total_mass();
  if (!(t > 0.0)) {
    throw Error(ErrorCode::NotProbability, "cannot normalise a zero measure");
  }
  for (double& m : mass) m /= t;
  for (double& a : atom) a /= t;
}

GridMeasure lebesgue(const Grid& grid) {
  GridMeasure mu(grid);
  for (int e = 0; e < grid.graph().num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      mu.at(e, i) = grid.width(e);
    }
  }
  return mu;
}

void require_probability(const GridMeasure& mu, const char* what) {
  if (!mu.is_probability(1e-9)) {
    throw Error(ErrorCode::NotProbability,
                std::string(what) + ": total mass " + std::to_string(mu.total_mass()));
  }
}

void require_atom_free(const GridMeasure& mu, const char* what) {
  for (int v = 0; v < static_cast<int>(mu.atom.size()); ++v) {
    if (mu.atom[v] != 0.0) {
      throw Error(ErrorCode::AtomPresent,
                  std::string(what) + ": atom at vertex '" +
                      mu.grid.graph().vertex_name(v) + "'");
    }
  }
}

}  // namespace graphot
