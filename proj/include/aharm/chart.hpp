#pragma once

#include "aharm/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace aharm {

/* A single coordinate chart of an analytic domain: a coordinate box with a
 * smooth metric evaluator. Closed-form Christoffel symbols and volume factor
 * are optional; defaults fall back to five-point stencils of the metric. */
struct Chart {
  int dim = 0;
  Vec lo, hi;
  std::vector<bool> periodic;
  std::function<Mat(const Vec&)> metric;
  std::function<std::vector<Mat>(const Vec&)> christoffel; // gamma[k](i,j), optional
  std::function<double(const Vec&)> sqrt_det;              // optional
  double stencil_h = 5e-3;
};

struct QuadratureRule {
  Mat nodes;   // N x dim chart coordinates
  Vec weights; // coordinate-box measure only (volume factor applied at integration)
};

/* Gauss-Legendre nodes/weights on [a, b]. */
void gauss_legendre(int n, double a, double b, Vec& nodes, Vec& weights);

/* Tensor-product rule: Gauss-Legendre on non-periodic axes, uniform midpoint
 * on periodic axes (spectrally accurate for smooth periodic integrands). */
QuadratureRule tensor_rule(const Chart& chart, const std::vector<int>& nodes_per_axis);

/* Christoffel symbols from a metric evaluator by central stencils. */
std::vector<Mat> christoffel_from_metric(const std::function<Mat(const Vec&)>& metric,
                                         const Vec& u, double h);

/* A smooth m-manifold presented by charts with quadrature rules. The chart
 * list covers the manifold up to measure zero; all catalog domains use a
 * single chart. */
class AnalyticDomain {
public:
  std::string name;
  std::vector<Chart> charts;
  std::vector<QuadratureRule> rules;

  int dim() const { return charts.empty() ? 0 : charts[0].dim; }

  Mat metric(int c, const Vec& u) const { return charts[c].metric(u); }
  Mat metric_inv(int c, const Vec& u) const;
  std::vector<Mat> christoffel(int c, const Vec& u) const;
  double sqrt_det(int c, const Vec& u) const;

  /* integral over the manifold of a scalar sample function f(chart, u). */
  double integrate(const std::function<double(int, const Vec&)>& f) const;
  double volume() const;

  /* Domain with metric factor^2 * g (and matching Christoffels / volume).
   * dlog_factor, when supplied, must return the coordinate gradient of
   * log(factor); otherwise it is taken by stencil. */
  std::shared_ptr<const AnalyticDomain> conformal_rescale(
      std::function<double(int, const Vec&)> factor,
      std::function<Vec(int, const Vec&)> dlog_factor = nullptr) const;
};

using DomainPtr = std::shared_ptr<const AnalyticDomain>;

} // namespace aharm
