#include "aharm/conformal.hpp"

#include "aharm/stencil.hpp"
#include "aharm/tensors.hpp"

#include <cmath>

namespace aharm {

namespace {

double min_singular_value_at(const AnalyticMap& map, int c, const Vec& u) {
  Mat J = map.dpsi(c, u);
  Mat H = map.target.euclidean_coords() ? Mat(Mat::Identity(J.rows(), J.rows()))
                                        : map.target.metric(map.psi(c, u));
  Mat M = J.transpose() * H * J;
  Mat g = map.domain->metric(c, u);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(M, g);
  if (es.info() != Eigen::Success) fail("singular value solve failed");
  double lam = es.eigenvalues().minCoeff();
  return lam > 0 ? std::sqrt(lam) : 0.0;
}

double sample_min_singular_value(const AnalyticMap& map) {
  double worst = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < map.domain->charts.size(); ++c) {
    const QuadratureRule& rule = map.domain->rules[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      worst = std::min(worst, min_singular_value_at(map, static_cast<int>(c), u));
    }
  }
  return worst;
}

double target_norm(const AnalyticMap& map, int c, const Vec& u, const Vec& v) {
  if (map.target.euclidean_coords()) return v.norm();
  return std::sqrt(v.dot(map.target.metric(map.psi(c, u)) * v));
}

} // namespace

ConformalFactor alpha_conformal_factor(const AnalyticMap& map, double alpha,
                                       double degeneracy_tol) {
  int m = map.domain->dim();
  if (m <= 2) fail("conformal factor needs domain dimension m > 2, got %d", m);
  if (!(alpha >= 1.0)) fail("alpha must be >= 1");
  double sv = sample_min_singular_value(map);
  if (sv <= degeneracy_tol)
    fail("map is degenerate: min singular value %.3g <= %.3g", sv, degeneracy_tol);
  double c0 = std::pow(2.0 * alpha, 1.0 / (m - 2));
  double expo = (alpha - 1.0) / (m - 2);
  AnalyticMap local = map;
  ConformalFactor out;
  out.min_singular_value = sv;
  out.mu = [local, c0, expo](int c, const Vec& u) {
    return c0 * std::pow(1.0 + local.energy_density(c, u), expo);
  };
  // d log mu = expo d log(1+t); d_i t from the covariant pullback data.
  out.dlog_mu = [local, expo](int c, const Vec& u) {
    PullbackDeriv pd = pullback_deriv(local, c, u);
    int n = local.target.dim();
    return Vec(expo * n / (1.0 + n * pd.mu2) * pd.dmu2);
  };
  return out;
}

Vec alpha_conformal_factor(const DiscreteMap& /*map*/, double alpha, double /*degeneracy_tol*/) {
  if (!(alpha >= 1.0)) fail("alpha must be >= 1");
  fail("the conformal factor requires domain dimension m > 2; mesh domains have m = 2");
}

Vec transformed_tension_at(const AnalyticMap& map,
                           const std::function<double(int, const Vec&)>& mu,
                           int chart, const Vec& u) {
  int m = map.domain->dim();
  auto s = [&](int c, const Vec& v) { return std::pow(mu(c, v), m - 2); };
  Vec grad_s = grad_scalar(*map.domain, s, chart, u);
  Vec tau = tension_at(map, chart, u);
  double muv = mu(chart, u);
  return std::pow(muv, -m) * (s(chart, u) * tau + map.dpsi(chart, u) * grad_s);
}

ConformalEquivalenceReport check_conformal_equivalence(const AnalyticMap& map, double alpha) {
  ConformalFactor factor = alpha_conformal_factor(map, alpha);
  int m = map.domain->dim();
  DomainPtr rescaled = map.domain->conformal_rescale(factor.mu, factor.dlog_mu);
  AnalyticMap barred = map.with_domain(rescaled);
  ConformalEquivalenceReport rep;
  rep.min_singular_value = factor.min_singular_value;
  for (size_t c = 0; c < map.domain->charts.size(); ++c) {
    const QuadratureRule& rule = map.domain->rules[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      int ci = static_cast<int>(c);
      Vec tau_bar = tension_at(barred, ci, u);
      Vec tau_a = alpha_tension_at(map, alpha, ci, u);
      double muv = factor.mu(ci, u);
      double r1 = target_norm(map, ci, u, Vec(std::pow(muv, m) * tau_bar - tau_a)) /
                  (1.0 + target_norm(map, ci, u, tau_a));
      Vec tau_law = transformed_tension_at(map, factor.mu, ci, u);
      double r2 = target_norm(map, ci, u, Vec(tau_bar - tau_law)) /
                  (1.0 + target_norm(map, ci, u, tau_law));
      rep.max_identity_residual = std::max(rep.max_identity_residual, r1);
      rep.max_law_residual = std::max(rep.max_law_residual, r2);
    }
  }
  return rep;
}

namespace smallenergy {

double h(double t, double alpha) {
  if (!(alpha > 1.0)) fail("profile needs alpha > 1");
  if (!(1.0 + 2.0 * t > 0)) fail("profile argument out of range (t = %.17g)", t);
  return std::pow(1.0 + 2.0 * t, alpha);
}

double h_prime(double t, double alpha) {
  if (!(alpha > 1.0)) fail("profile needs alpha > 1");
  if (!(1.0 + 2.0 * t > 0)) fail("profile argument out of range (t = %.17g)", t);
  return 2.0 * alpha * std::pow(1.0 + 2.0 * t, alpha - 1.0);
}

double h_prime_inverse(double s, double alpha) {
  if (!(alpha > 1.0)) fail("profile needs alpha > 1");
  double s0 = 2.0 * alpha;
  if (s < s0 * (1.0 - 1e-12))
    fail("h' inverse needs s >= 2 alpha = %.17g, got %.17g", s0, s);
  if (s < s0) s = s0;
  return 0.5 * (std::pow(s / s0, 1.0 / (alpha - 1.0)) - 1.0);
}

double y_of_u(double u, double alpha, int m) {
  return h_prime_inverse(std::pow(u, m - 2), alpha) / (u * u);
}

ValidityInterval validity_interval(double alpha, int m, double eps_cap, int samples) {
  if (!(alpha > 1.0)) fail("construction needs alpha > 1");
  if (!(m > 2.0 * alpha))
    fail("construction needs m > 2 alpha (m = %d, 2 alpha = %.17g)", m, 2.0 * alpha);
  if (samples < 2) fail("need at least 2 samples");
  ValidityInterval iv;
  iv.alpha = alpha;
  iv.m = m;
  iv.samples = samples;
  iv.u_lo = std::pow(2.0 * alpha, 1.0 / (m - 2));
  iv.u_hi = std::pow(h_prime(eps_cap, alpha), 1.0 / (m - 2));
  double prev = 0.0; // y(u_lo) = 0
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 1; i < samples; ++i) {
    double u = iv.u_lo + (iv.u_hi - iv.u_lo) * i / (samples - 1);
    double y = y_of_u(u, alpha, m);
    double d = y - prev;
    if (!(d > 0))
      fail("y(u) failed strict monotonicity at sample %d (delta %.3g)", i, d);
    margin = std::min(margin, d);
    prev = y;
  }
  iv.monotonic_margin = margin;
  iv.eps_prime = 0.9 * prev;
  return iv;
}

double theta(double y, const ValidityInterval& iv) {
  if (y < 0 || y > iv.eps_prime)
    fail("theta argument %.17g outside certified range [0, %.17g]", y, iv.eps_prime);
  if (y == 0) return iv.u_lo;
  double a = iv.u_lo, b = iv.u_hi;
  /* y_of_u is strictly increasing with y_of_u(a) = 0 <= y < y_of_u(b). */
  for (int it = 0; it < 120; ++it) {
    double mid = 0.5 * (a + b);
    if (y_of_u(mid, iv.alpha, iv.m) < y)
      a = mid;
    else
      b = mid;
    if (b - a < 1e-16 * iv.u_hi) break;
  }
  return 0.5 * (a + b);
}

DensityFactor density_factor(const AnalyticMap& map, double alpha) {
  int m = map.domain->dim();
  DensityFactor out;
  out.interval = validity_interval(alpha, m);
  double worst = 0;
  for (size_t c = 0; c < map.domain->charts.size(); ++c) {
    const QuadratureRule& rule = map.domain->rules[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      worst = std::max(worst, 0.5 * map.energy_density(static_cast<int>(c), u));
    }
  }
  out.max_half_density = worst;
  if (worst >= out.interval.eps_prime)
    fail("energy density too large for the construction: max |dpsi|^2/2 = %.17g >= "
         "eps' = %.17g", worst, out.interval.eps_prime);
  AnalyticMap local = map;
  ValidityInterval iv = out.interval;
  out.mu = [local, iv](int c, const Vec& u) {
    return theta(0.5 * local.energy_density(c, u), iv);
  };
  return out;
}

double density_identity_residual(const AnalyticMap& map, const DensityFactor& factor,
                                 double alpha) {
  int m = map.domain->dim();
  double worst = 0;
  for (size_t c = 0; c < map.domain->charts.size(); ++c) {
    const QuadratureRule& rule = map.domain->rules[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      int ci = static_cast<int>(c);
      double mu = factor.mu(ci, u);
      double t_hat = map.energy_density(ci, u);
      double lhs = std::pow(mu, m - 2);
      double rhs = 2.0 * alpha * std::pow(1.0 + mu * mu * t_hat, alpha - 1.0);
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
  }
  return worst;
}

BuildReport make_alpha_harmonic_metric(const AnalyticMap& map, double alpha,
                                       double harmonic_tol) {
  BuildReport rep;
  rep.input_tension_l2 = tension_l2_norm(MapState(map));
  if (rep.input_tension_l2 > harmonic_tol)
    fail("input map is not harmonic (tension L2 norm %.3g > %.3g)", rep.input_tension_l2,
         harmonic_tol);
  DensityFactor factor = density_factor(map, alpha);
  rep.interval = factor.interval;
  rep.max_half_density = factor.max_half_density;
  rep.identity_residual = density_identity_residual(map, factor, alpha);
  auto inv_mu = [mu = factor.mu](int c, const Vec& u) { return 1.0 / mu(c, u); };
  rep.rescaled_domain = map.domain->conformal_rescale(inv_mu);
  AnalyticMap barred = map.with_domain(rep.rescaled_domain);
  rep.alpha_tension_l2 = alpha_tension_l2_norm(MapState(barred), alpha);
  rep.alpha_tension_max = alpha_tension_max_norm(barred, alpha);
  return rep;
}

} // namespace smallenergy

} // namespace aharm
