#pragma once

#include "aharm/variational.hpp"

namespace aharm {

/* Conformal factor mu = (2 alpha)^(1/(m-2)) (1 + |dpsi|^2)^((alpha-1)/(m-2))
 * turning alpha-harmonicity into harmonicity with respect to mu^2 g.
 * Requires m > 2 and a nowhere-degenerate differential. */
struct ConformalFactor {
  std::function<double(int, const Vec&)> mu;
  std::function<Vec(int, const Vec&)> dlog_mu; // coordinate gradient of log mu
  double min_singular_value = 0;               // of dpsi over quadrature samples
};
ConformalFactor alpha_conformal_factor(const AnalyticMap& map, double alpha,
                                       double degeneracy_tol = 1e-8);

/* Per-face factor values for a mesh map (diagnostic use). */
Vec alpha_conformal_factor(const DiscreteMap& map, double alpha,
                           double degeneracy_tol = 1e-8);

/* Tension under g_bar = mu^2 g from data under g:
 * tau_bar = mu^-m (mu^(m-2) tau + dpsi(grad_g mu^(m-2))). */
Vec transformed_tension_at(const AnalyticMap& map,
                           const std::function<double(int, const Vec&)>& mu,
                           int chart, const Vec& u);

/* Two-path check: tau_bar computed directly under the rescaled metric must
 * satisfy mu^m tau_bar = tau_alpha, and must match the transformation law. */
struct ConformalEquivalenceReport {
  double max_identity_residual = 0; // |mu^m tau_bar - tau_alpha| / (1 + |tau_alpha|)
  double max_law_residual = 0;      // direct tau_bar vs transformation law
  double min_singular_value = 0;
};
ConformalEquivalenceReport check_conformal_equivalence(const AnalyticMap& map, double alpha);

/* Construction of a conformal metric making a harmonic map with small energy
 * density alpha-harmonic, via the profile h(t) = (1+2t)^alpha. */
namespace smallenergy {

double h(double t, double alpha);       // (1+2t)^alpha
double h_prime(double t, double alpha); // 2 alpha (1+2t)^(alpha-1)
double h_prime_inverse(double s, double alpha); // right inverse, s >= 2 alpha

/* y(u) = h_prime_inverse(u^(m-2)) / u^2 sampled on
 * [(2 alpha)^(1/(m-2)), h_prime(eps_cap)^(1/(m-2))]; strictly increasing when
 * m > 2 alpha, which is checked. eps_prime = 0.9 * y(u_hi) is the certified
 * small-density threshold. */
struct ValidityInterval {
  double alpha = 0;
  int m = 0;
  double u_lo = 0, u_hi = 0;
  double eps_prime = 0;
  double monotonic_margin = 0;
  int samples = 0;
};
ValidityInterval validity_interval(double alpha, int m, double eps_cap = 10.0,
                                   int samples = 1000);

double y_of_u(double u, double alpha, int m);

/* Solves y = y_of_u(theta) for theta in [u_lo, u_hi]; theta(0) = u_lo.
 * Requires 0 <= y <= interval.eps_prime. */
double theta(double y, const ValidityInterval& interval);

/* Density factor mu(x) = theta(|dpsi|^2 / 2) for a map with small density. */
struct DensityFactor {
  ValidityInterval interval;
  std::function<double(int, const Vec&)> mu;
  double max_half_density = 0; // max |dpsi|^2 / 2 over quadrature samples
};
DensityFactor density_factor(const AnalyticMap& map, double alpha);

/* Residual of mu^(m-2) = 2 alpha (1 + mu^2 |dpsi|^2)^(alpha-1), the density
 * measured under mu^-2 g (inverse metric scales by mu^2). */
double density_identity_residual(const AnalyticMap& map, const DensityFactor& factor,
                                 double alpha);

/* Full construction: check the input is harmonic, rescale by mu^-2, and
 * measure the alpha-tension of the same map under the new metric. */
struct BuildReport {
  ValidityInterval interval;
  double input_tension_l2 = 0;
  double max_half_density = 0;
  double identity_residual = 0;
  double alpha_tension_l2 = 0;
  double alpha_tension_max = 0;
  DomainPtr rescaled_domain;
};
BuildReport make_alpha_harmonic_metric(const AnalyticMap& map, double alpha,
                                       double harmonic_tol = 1e-8);

} // namespace smallenergy

} // namespace aharm
