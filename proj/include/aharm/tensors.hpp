#pragma once

#include "aharm/variational.hpp"

namespace aharm {

using DomainVectorField = std::function<Vec(int, const Vec&)>; // chart coefficients

/* alpha-stress-energy tensor S = (1+|dpsi|^2)^alpha g
 *                              - 2 alpha (1+|dpsi|^2)^(alpha-1) psi*h. */
Mat stress_energy_at(const AnalyticMap& map, double alpha, int chart, const Vec& u);
SymmetricTensorField stress_energy(const MapState& map, double alpha);

/* trace_g S; equals m (1+t)^alpha - 2 alpha (1+t)^(alpha-1) t pointwise. */
double stress_energy_trace(const AnalyticMap& map, double alpha, int chart, const Vec& u);

/* (div S)(Y) = g^{ij} (nabla_i S)_{jk} Y^k at a chart point. Analytic maps
 * only; the weak mesh divergence is not provided. */
double div_stress_energy_at(const AnalyticMap& map, double alpha, const DomainVectorField& Y,
                            int chart, const Vec& u);

/* Pointwise covariant data of the pullback tensor M = dpsi^T h dpsi:
 * nabla_i M together with mu^2 = tr(g^-1 M)/n and its coordinate partials
 * (n is the target dimension, so t = |dpsi|^2 = n mu^2).  Stencils touch
 * only the smooth, bounded embedded jacobian and target metric, so the
 * data stays accurate near chart degeneracies. */
struct PullbackDeriv {
  Mat M;
  std::vector<Mat> covM; // nabla_i M
  double mu2 = 0;
  Vec dmu2; // d_i mu^2
};
PullbackDeriv pullback_deriv(const AnalyticMap& map, int chart, const Vec& u);

/* Residuals of (div S)(Y) = -h(tau_alpha, dpsi(Y)) over quadrature samples. */
struct StressDivergenceReport {
  double max_residual = 0;
  double max_trace_residual = 0;
};
StressDivergenceReport check_stress_divergence(const AnalyticMap& map, double alpha,
                                               const std::vector<DomainVectorField>& fields);

/* Horizontally conformal submersion with the vertical/horizontal machinery.
 * The kernel of dpsi is rank-detected against the generalized eigenvalues of
 * the metric pullback: directions below kKernelTol * (1 + max eigenvalue)
 * count as vertical. Conformality (equal nonzero eigenvalues) is verified on
 * demand. */
class SubmersionMap {
public:
  SubmersionMap(AnalyticMap map);

  const AnalyticMap& map() const { return map_; }
  int domain_dim() const { return map_.domain->dim(); }
  int target_dim() const { return map_.target.dim(); }
  int fiber_dim() const { return domain_dim() - target_dim(); }

  static constexpr double kKernelTol = 1e-8;

  /* Vertical projector P (a (1,1) tensor in chart indices). */
  Mat vertical_projector(int chart, const Vec& u) const;

  /* mu^2 with anisotropy/rank verification (throws when the map fails to be
   * a horizontally conformal submersion at u). */
  double dilation_sq(int chart, const Vec& u, double conformal_tol = 1e-8) const;

  /* X = vertical + horizontal (chart coefficients). */
  std::pair<Vec, Vec> hv_split(int chart, const Vec& u, const Vec& X) const;

  /* Mean curvature vector of the fibers (horizontal) and of the horizontal
   * distribution (vertical), from the covariant divergence of P. */
  Vec fiber_mean_curvature(int chart, const Vec& u) const;
  Vec horizontal_mean_curvature(int chart, const Vec& u) const;

  /* (1/(2 mu^2)) (grad mu^2)^V, the independent route to the horizontal mean
   * curvature. */
  Vec horizontal_mean_curvature_via_dilation(int chart, const Vec& u) const;

  Vec grad_dilation_sq(int chart, const Vec& u) const; // g^-1 d(mu^2)

private:
  AnalyticMap map_;
};

/* Hypotheses and verdicts for the minimal-fiber criterion of alpha-harmonic
 * horizontally conformal submersions: with m > n, n > 2 alpha, the fibers are
 * minimal iff the horizontal gradient of mu^2 vanishes, and the two terms of
 * the balance identity
 *   alpha (1+n mu^2)^(alpha-2) [(n-2) + n mu^2 (n-2 alpha)] (grad mu^2)^H
 *   + 2 (m-n) alpha mu^2 (1+n mu^2)^(alpha-1) H = 0
 * cancel pointwise. */
struct MinimalFiberReport {
  int m = 0, n = 0, q = 0;
  bool hypotheses_ok = false;
  std::string hypothesis_message;
  double alpha_tension_l2 = 0;
  /* Geometry maxima over the quadrature nodes; measured whether or not the
   * hypotheses hold. */
  double max_fiber_mean_curvature = 0;
  double max_horizontal_grad = 0;
  double max_balance_residual = 0;
  bool fibers_minimal = false;
  bool horizontal_grad_zero = false;
  bool equivalence_consistent = false; // vacuously true when hypotheses fail
};
MinimalFiberReport check_minimal_fibers(const SubmersionMap& sub, double alpha,
                                        double vanish_tol = 1e-8,
                                        double harmonic_tol = 1e-6);

} // namespace aharm
