// Internal helpers shared by the primal-dual solvers.
#pragma once

#include <algorithm>
#include <cmath>

namespace graphot::detail {

// prox of  gamma * alpha(s, u)  with alpha(s, u) = u^2 / s: the density part
// solves (s - s0)(s + 2 gamma)^2 = gamma u0^2 (largest root), the momentum
// part follows as u0 s / (s + 2 gamma); nonpositive roots collapse to the
// apex (0, 0).
inline void prox_alpha(double s0, double u0, double gamma, double* s_out, double* u_out) {
  auto P = [&](double s) {
    double t = s + 2.0 * gamma;
    return (s - s0) * t * t - gamma * u0 * u0;
  };
  if (P(0.0) >= 0.0) {
    *s_out = 0.0;
    *u_out = 0.0;
    return;
  }
  double lo = std::max(s0, 0.0);
  double hi = std::max(s0, 0.0) + std::cbrt(gamma * u0 * u0) + 1e-30;
  while (P(hi) <= 0.0) hi = 2.0 * hi + 1e-3;
  if (P(lo) > 0.0) lo = 0.0;
  double s = hi;
  for (int it = 0; it < 60; ++it) {
    double t = s + 2.0 * gamma;
    double val = (s - s0) * t * t - gamma * u0 * u0;
    if (val > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    double deriv = t * t + 2.0 * (s - s0) * t;
    double step = deriv != 0.0 ? s - val / deriv : 0.5 * (lo + hi);
    s = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * (1.0 + hi)) break;
  }
  *s_out = s;
  *u_out = u0 * s / (s + 2.0 * gamma);
}

inline double safe_alpha(double s, double u) {
  if (s > 1e-14) return u * u / s;
  if (std::abs(u) <= 1e-11) return 0.0;
  return u * u / 1e-14;
}

// prox of  gamma * (m log(m / c) + b m)  over m >= 0, by safeguarded Newton
// on the strictly increasing optimality function.
inline double prox_entropy(double q, double gamma, double c, double b) {
  auto phi = [&](double m) { return m + gamma * (std::log(m / c) + 1.0 + b) - q; };
  double lo = 1e-300;
  double hi = std::max({q, c, 1.0}) + gamma * 50.0;
  while (phi(hi) < 0.0) hi *= 2.0;
  double m = std::max(q, 0.5 * c * std::exp(-1.0 - b));
  if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    double val = phi(m);
    if (val > 0.0) {
      hi = m;
    } else {
      lo = m;
    }
    double deriv = 1.0 + gamma / m;
    double step = m - val / deriv;
    m = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * (1.0 + hi)) break;
  }
  return m;
}

}  // namespace graphot::detail
