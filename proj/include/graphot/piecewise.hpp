#pragma once

#include <vector>

namespace graphot {

// Continuous piecewise-linear function on an interval, given by increasing
// breakpoints and nodal values. All integrals are exact (the integrands are
// polynomial per piece, except the ratio form which has a closed form).
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> v;

  double domain_left() const { return x.front(); }
  double domain_right() const { return x.back(); }

  double evaluate(double t) const;
  double integral(double a, double b) const;
  double integral() const { return integral(x.front(), x.back()); }
  // Integral over [a, b] of the running antiderivative  t -> integral(x0, t);
  // exact (the antiderivative is piecewise quadratic).
  double antiderivative_integral(double a, double b) const;
  double min_value() const;
  double max_value() const;

  // Values sampled at cell centers of a uniform n-cell partition of
  // [0, length], with prescribed endpoint values.
  static PiecewiseLinear from_cell_samples(double length, const std::vector<double>& centers,
                                           double left_value, double right_value);
};

// Exact integral of f*g over [a, b] (quadratic per merged piece).
double integrate_product(const PiecewiseLinear& f, const PiecewiseLinear& g, double a, double b);

// Exact integral of u^2 / r over the common domain, with the perspective
// convention: pieces where r == 0 contribute 0 when u == 0 there and +inf
// otherwise. r must be nonnegative.
double integrate_ratio_square(const PiecewiseLinear& u, const PiecewiseLinear& r);

}  // namespace graphot
