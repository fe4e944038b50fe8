#include "graphot/potential.hpp"

#include <cmath>

#include "graphot/errors.hpp"

namespace graphot {

ScalarPotential ScalarPotential::zero(const Grid& grid) {
  return ScalarPotential(GridFunction(grid), true);
}

ScalarPotential ScalarPotential::sample(const Grid& grid,
                                        const std::function<double(int, double)>& f) {
  return ScalarPotential(GridFunction::sample(grid, f), false);
}

double ScalarPotential::face(int e, int k) const {
  const int n = values_.grid.cells(e);
  if (k <= 0) return values_.at(e, 0);
  if (k >= n) return values_.at(e, n - 1);
  return 0.5 * (values_.at(e, k - 1) + values_.at(e, k));
}

std::vector<double> ScalarPotential::reference_cell_masses() const {
  const Grid& g = values_.grid;
  std::vector<double> m(g.num_cells());
  for (int e = 0; e < g.graph().num_edges(); ++e) {
    for (int i = 0; i < g.cells(e); ++i) {
      m[g.flat(e, i)] = std::exp(-values_.at(e, i)) * g.width(e);
    }
  }
  return m;
}

double ScalarPotential::reference_total_mass() const {
  double t = 0.0;
  for (double m : reference_cell_masses()) t += m;
  return t;
}

InteractionKernel InteractionKernel::zero() { return InteractionKernel{}; }

InteractionKernel InteractionKernel::constant(double value) {
  InteractionKernel w;
  w.kind_ = Kind::Constant;
  w.a_ = value;
  return w;
}

InteractionKernel InteractionKernel::metric_power(double coeff, int power) {
  if (power != 1 && power != 2) {
    throw Error(ErrorCode::ConfigInvalid, "metric kernel power must be 1 or 2");
  }
  InteractionKernel w;
  w.kind_ = Kind::MetricPower;
  w.a_ = coeff;
  w.b_ = power;
  return w;
}

InteractionKernel InteractionKernel::gauss_of_distance(double amp, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "gaussian kernel needs sigma > 0");
  }
  InteractionKernel w;
  w.kind_ = Kind::GaussOfDistance;
  w.a_ = amp;
  w.b_ = sigma;
  return w;
}

InteractionKernel InteractionKernel::table(std::vector<std::vector<double>> values) {
  InteractionKernel w;
  w.kind_ = Kind::Table;
  w.table_ = std::move(values);
  return w;
}

void InteractionKernel::check_table_symmetric() const {
  for (size_t i = 0; i < table_.size(); ++i) {
    if (table_[i].size() != table_.size()) {
      throw Error(ErrorCode::AsymmetricKernel, "table is not square");
    }
    for (size_t j = 0; j < i; ++j) {
      if (std::abs(table_[i][j] - table_[j][i]) > 1e-12) {
        throw Error(ErrorCode::AsymmetricKernel,
                    "W(i,j) != W(j,i) at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

double InteractionKernel::evaluate(const MetricGraph& g, const GraphPoint& x,
                                   const GraphPoint& y) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return a_;
    case Kind::MetricPower: {
      double d = g.distance(x, y);
      return b_ == 1 ? a_ * d : a_ * d * d;
    }
    case Kind::GaussOfDistance: {
      double d = g.distance(x, y);
      return a_ * std::exp(-d * d / (2.0 * b_ * b_));
    }
    case Kind::Table:
      throw Error(ErrorCode::ConfigInvalid,
                  "table kernels have no off-support evaluation");
  }
  return 0.0;
}

GridFunction mean_field_potential(const GridMeasure& mu, const InteractionKernel& W) {
  if (W.is_table()) {
    throw Error(ErrorCode::ConfigInvalid,
                "mean-field potential needs a kernel defined off the support");
  }
  const Grid& grid = mu.grid;
  const MetricGraph& g = grid.graph();
  GridFunction out(grid);
  if (W.is_zero()) return out;

  std::vector<GraphPoint> sources;
  std::vector<double> masses;
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      double m = mu.at(e, i);
      if (m != 0.0) {
        sources.push_back(g.canonical({e, grid.cell_center(e, i)}));
        masses.push_back(m);
      }
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (mu.atom[v] != 0.0) {
      sources.push_back(g.vertex_point(v));
      masses.push_back(mu.atom[v]);
    }
  }

  auto accumulate = [&](const GraphPoint& x) {
    double s = 0.0;
    for (size_t q = 0; q < sources.size(); ++q) {
      s += W.evaluate(g, x, sources[q]) * masses[q];
    }
    return s;
  };

  for (int e = 0; e < g.num_edges(); ++e) {
    for (int i = 0; i < grid.cells(e); ++i) {
      out.at(e, i) = accumulate(g.canonical({e, grid.cell_center(e, i)}));
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    out.vertex[v] = accumulate(g.vertex_point(v));
  }
  return out;
}

}  // namespace graphot
