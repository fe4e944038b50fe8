#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "graphot/grid.hpp"
#include "graphot/grid_function.hpp"

namespace graphot {

// Drift potential V, Lipschitz on each closed edge, allowed to jump across
// vertices. Stored as cell-center samples; face values are averaged inside
// an edge and one-sided at the endpoints.
class ScalarPotential {
 public:
  static ScalarPotential zero(const Grid& grid);
  static ScalarPotential sample(const Grid& grid,
                                const std::function<double(int, double)>& f);

  const Grid& grid() const { return values_.grid; }
  double cell(int e, int i) const { return values_.at(e, i); }

  // Value at interface k in [0, cells(e)] of edge e.
  double face(int e, int k) const;

  double sup_norm() const { return values_.max_abs(); }
  bool is_zero() const { return zero_; }

  // Cell masses of the weighted reference measure  e^{-V} dlambda.
  std::vector<double> reference_cell_masses() const;
  double reference_total_mass() const;

 private:
  explicit ScalarPotential(GridFunction values, bool zero)
      : values_(std::move(values)), zero_(zero) {}

  GridFunction values_;
  bool zero_ = false;
};

// Symmetric interaction kernel W(x, y). Either a scalar profile of the graph
// distance (symmetric by construction) or a direct table over the support
// points of a measure.
class InteractionKernel {
 public:
  enum class Kind { Zero, Constant, MetricPower, GaussOfDistance, Table };

  static InteractionKernel zero();
  static InteractionKernel constant(double value);
  // coeff * d(x,y)^power with power in {1, 2}
  static InteractionKernel metric_power(double coeff, int power);
  // amp * exp(-d(x,y)^2 / (2 sigma^2))
  static InteractionKernel gauss_of_distance(double amp, double sigma);
  // Direct table over an externally fixed support enumeration; must be
  // symmetric (checked on use, AsymmetricKernel otherwise).
  static InteractionKernel table(std::vector<std::vector<double>> values);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_table() const { return kind_ == Kind::Table; }

  double evaluate(const MetricGraph& g, const GraphPoint& x, const GraphPoint& y) const;
  double table_value(int i, int j) const { return table_[i][j]; }
  int table_size() const { return static_cast<int>(table_.size()); }
  void check_table_symmetric() const;

 private:
  Kind kind_ = Kind::Zero;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<std::vector<double>> table_;
};

// Mean-field potential W[mu](x) = sum_q W(x, x_q) m_q sampled on the grid of
// mu (cell centers and vertices). Table kernels are rejected here: they have
// no off-support values.
GridFunction mean_field_potential(const GridMeasure& mu, const InteractionKernel& W);

}  // namespace graphot
