#include "graphot/piecewise.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace graphot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double PiecewiseLinear::evaluate(double t) const {
  if (t <= x.front()) return v.front();
  if (t >= x.back()) return v.back();
  auto it = std::upper_bound(x.begin(), x.end(), t);
  size_t j = static_cast<size_t>(it - x.begin());
  double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
  return v[j - 1] + w * (v[j] - v[j - 1]);
}

double PiecewiseLinear::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  a = std::max(a, x.front());
  b = std::min(b, x.back());
  if (b <= a) return 0.0;
  double total = 0.0;
  for (size_t j = 0; j + 1 < x.size(); ++j) {
    double lo = std::max(a, x[j]);
    double hi = std::min(b, x[j + 1]);
    if (hi <= lo) continue;
    // trapezoid over the clipped subinterval
    double flo = evaluate(lo);
    double fhi = evaluate(hi);
    total += 0.5 * (flo + fhi) * (hi - lo);
  }
  return total;
}

double PiecewiseLinear::antiderivative_integral(double a, double b) const {
  if (b < a) return -antiderivative_integral(b, a);
  a = std::max(a, x.front());
  b = std::min(b, x.back());
  if (b <= a) return 0.0;
  double total = 0.0;
  double running = 0.0;  // antiderivative value at x[j]
  for (size_t j = 0; j + 1 < x.size(); ++j) {
    const double xl = x[j], xr = x[j + 1];
    const double dx = xr - xl;
    if (xr > a && xl < b) {
      const double lo = std::max(a, xl), hi = std::min(b, xr);
      const double slope = (v[j + 1] - v[j]) / dx;
      const double tl = lo - xl, tr = hi - xl;
      total += running * (hi - lo) + 0.5 * v[j] * (tr * tr - tl * tl) +
               slope * (tr * tr * tr - tl * tl * tl) / 6.0;
    }
    running += 0.5 * (v[j] + v[j + 1]) * dx;
    if (xl >= b) break;
  }
  return total;
}

double PiecewiseLinear::min_value() const {
  double m = v.front();
  for (double val : v) m = std::min(m, val);
  return m;
}

double PiecewiseLinear::max_value() const {
  double m = v.front();
  for (double val : v) m = std::max(m, val);
  return m;
}

PiecewiseLinear PiecewiseLinear::from_cell_samples(double length,
                                                   const std::vector<double>& centers,
                                                   double left_value, double right_value) {
  PiecewiseLinear f;
  const size_t n = centers.size();
  assert(n >= 1);
  const double h = length / static_cast<double>(n);
  f.x.reserve(n + 2);
  f.v.reserve(n + 2);
  f.x.push_back(0.0);
  f.v.push_back(left_value);
  for (size_t i = 0; i < n; ++i) {
    f.x.push_back((static_cast<double>(i) + 0.5) * h);
    f.v.push_back(centers[i]);
  }
  f.x.push_back(length);
  f.v.push_back(right_value);
  return f;
}

namespace {

std::vector<double> merged_breaks(const PiecewiseLinear& f, const PiecewiseLinear& g,
                                  double a, double b) {
  std::vector<double> knots;
  knots.push_back(a);
  knots.push_back(b);
  for (double t : f.x) {
    if (t > a && t < b) knots.push_back(t);
  }
  for (double t : g.x) {
    if (t > a && t < b) knots.push_back(t);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  return knots;
}

}  // namespace

double integrate_product(const PiecewiseLinear& f, const PiecewiseLinear& g, double a, double b) {
  if (b < a) return -integrate_product(f, g, b, a);
  a = std::max({a, f.x.front(), g.x.front()});
  b = std::min({b, f.x.back(), g.x.back()});
  if (b <= a) return 0.0;
  auto knots = merged_breaks(f, g, a, b);
  double total = 0.0;
  for (size_t j = 0; j + 1 < knots.size(); ++j) {
    double lo = knots[j], hi = knots[j + 1];
    double mid = 0.5 * (lo + hi);
    // Simpson is exact for the quadratic product of two linear pieces.
    double p_lo = f.evaluate(lo) * g.evaluate(lo);
    double p_mid = f.evaluate(mid) * g.evaluate(mid);
    double p_hi = f.evaluate(hi) * g.evaluate(hi);
    total += (hi - lo) / 6.0 * (p_lo + 4.0 * p_mid + p_hi);
  }
  return total;
}

double integrate_ratio_square(const PiecewiseLinear& u, const PiecewiseLinear& r) {
  double a = std::max(u.x.front(), r.x.front());
  double b = std::min(u.x.back(), r.x.back());
  if (b <= a) return 0.0;
  auto knots = merged_breaks(u, r, a, b);

  double scale_u = std::max(std::abs(u.min_value()), std::abs(u.max_value()));
  double scale_r = std::max(std::abs(r.min_value()), std::abs(r.max_value()));
  const double tiny_u = 1e-13 * (scale_u + 1e-300);
  const double tiny_r = 1e-13 * (scale_r + 1e-300);

  double total = 0.0;
  for (size_t j = 0; j + 1 < knots.size(); ++j) {
    const double lo = knots[j], hi = knots[j + 1];
    const double L = hi - lo;
    const double ua = u.evaluate(lo), ub = u.evaluate(hi);
    const double ra = r.evaluate(lo), rb = r.evaluate(hi);
    if (ra < -tiny_r || rb < -tiny_r) return kInf;  // negative density
    const double us = (ub - ua) / L;
    const double rs = (rb - ra) / L;

    if (std::abs(ra) <= tiny_r && std::abs(rb) <= tiny_r) {
      // zero-density piece: finite only if u vanishes too
      if (std::abs(ua) > tiny_u || std::abs(ub) > tiny_u) return kInf;
      continue;
    }

    if (std::abs(rs) * L <= tiny_r) {
      const double rbar = 0.5 * (ra + rb);
      total += (ua * ua * L + ua * us * L * L + us * us * L * L * L / 3.0) / rbar;
      continue;
    }

    // substitute w = ra + rs*(z - lo); u = A + B*w
    const double B = us / rs;
    const double A = ua - B * ra;
    const double w1 = ra, w2 = rb;
    if (std::min(w1, w2) <= tiny_r && std::abs(A) > tiny_u) {
      return kInf;  // u does not vanish where the density does
    }
    double part = 2.0 * A * B * (w2 - w1) + 0.5 * B * B * (w2 * w2 - w1 * w1);
    if (std::abs(A) > tiny_u) {
      part += A * A * (std::log(std::abs(w2)) - std::log(std::abs(w1)));
    }
    total += part / rs;
  }
  return total;
}

}  // namespace graphot
