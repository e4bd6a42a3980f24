#pragma once

#include "rigidity/errors.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace rigidity {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order on [-1, 1] (Newton on P_order).
inline QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw QuadratureFailure("Gauss-Legendre order must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels. Panels are
/// reduced in increasing order.
template <class F>
auto composite_gauss(F&& f, double a, double b, int panels, int order) {
  const QuadratureRule rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  using R = decltype(f(a));
  R total{};
  bool first = true;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h, mid = lo + 0.5 * h;
    R panel{};
    bool panel_first = true;
    for (int i = 0; i < order; ++i) {
      const R v = f(mid + 0.5 * h * rule.nodes[i]) * (rule.weights[i] * 0.5 * h);
      if (panel_first) {
        panel = v;
        panel_first = false;
      } else {
        panel += v;
      }
    }
    if (first) {
      total = panel;
      first = false;
    } else {
      total += panel;
    }
  }
  return total;
}

/// Trapezoid rule over one period [0, 2pi) with `points` samples; spectrally
/// accurate for smooth periodic integrands.
template <class F>
auto periodic_trapezoid(F&& f, int points) {
  using R = decltype(f(0.0));
  const double h = 2.0 * std::numbers::pi / points;
  R total = f(0.0) * h;
  for (int i = 1; i < points; ++i) total += f(i * h) * h;
  return total;
}

}  // namespace rigidity
