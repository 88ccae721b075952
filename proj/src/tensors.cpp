#include "aharm/tensors.hpp"

#include "aharm/stencil.hpp"

#include <cmath>

namespace aharm {

namespace {

Mat pullback_matrix(const AnalyticMap& map, int c, const Vec& u) {
  Mat J = map.dpsi(c, u);
  if (map.target.euclidean_coords()) return J.transpose() * J;
  return J.transpose() * map.target.metric(map.psi(c, u)) * J;
}

} // namespace

PullbackDeriv pullback_deriv(const AnalyticMap& map, int chart, const Vec& u) {
  const Chart& ch = map.domain->charts[chart];
  int m = ch.dim;
  int n = map.target.dim();
  /* Closed-form O(1)-smooth data, so the step sits near the fourth-order
   * roundoff/truncation balance eps^(1/5) instead of the coarser chart
   * default (which is sized for differentiating assembled fields). */
  double h = std::min(ch.stencil_h, 5e-4);
  auto A_at = [&](const Vec& v) { return map.dpsi(chart, v); };
  Mat A = A_at(u);
  std::vector<Mat> dA(m);
  for (int i = 0; i < m; ++i) dA[i] = deriv5_axis(A_at, u, i, h);

  PullbackDeriv out;
  std::vector<Mat> dM(m);
  if (map.target.euclidean_coords()) {
    out.M = A.transpose() * A;
    for (int i = 0; i < m; ++i)
      dM[i] = dA[i].transpose() * A + A.transpose() * dA[i];
  } else {
    auto B_at = [&](const Vec& v) { return map.target.metric(map.psi(chart, v)); };
    Mat B = B_at(u);
    std::vector<Mat> dB(m);
    for (int i = 0; i < m; ++i) dB[i] = deriv5_axis(B_at, u, i, h);
    out.M = A.transpose() * B * A;
    for (int i = 0; i < m; ++i)
      dM[i] = dA[i].transpose() * B * A + A.transpose() * dB[i] * A +
              A.transpose() * B * dA[i];
  }

  auto gamma = map.domain->christoffel(chart, u);
  out.covM.resize(m);
  for (int i = 0; i < m; ++i) {
    Mat cov = dM[i];
    for (int l = 0; l < m; ++l)
      for (int j = 0; j < m; ++j)
        for (int s = 0; s < m; ++s)
          cov(l, j) -= gamma[s](i, l) * out.M(s, j) + gamma[s](i, j) * out.M(l, s);
    out.covM[i] = std::move(cov);
  }

  Mat ginv = map.domain->metric_inv(chart, u);
  out.mu2 = (ginv * out.M).trace() / n;
  out.dmu2 = Vec(m);
  for (int i = 0; i < m; ++i) out.dmu2[i] = (ginv * out.covM[i]).trace() / n;
  return out;
}

Mat stress_energy_at(const AnalyticMap& map, double alpha, int chart, const Vec& u) {
  if (!(alpha >= 1.0)) fail("alpha must be >= 1");
  Mat J = map.dpsi(chart, u);
  Mat pullback;
  if (map.target.euclidean_coords())
    pullback = J.transpose() * J;
  else
    pullback = J.transpose() * map.target.metric(map.psi(chart, u)) * J;
  Mat g = map.domain->metric(chart, u);
  double t = (map.domain->metric_inv(chart, u) * pullback).trace();
  return std::pow(1.0 + t, alpha) * g - 2.0 * alpha * std::pow(1.0 + t, alpha - 1.0) * pullback;
}

SymmetricTensorField stress_energy(const MapState& map, double alpha) {
  if (!(alpha >= 1.0)) fail("alpha must be >= 1");
  if (map.is_mesh()) {
    const DiscreteMap& dm = map.mesh();
    std::vector<Mat2> vals(dm.mesh->num_faces());
    for (int f = 0; f < dm.mesh->num_faces(); ++f) {
      Mat D = dm.face_differential(f);
      Mat2 pullback;
      if (dm.target.euclidean_coords())
        pullback = D.transpose() * D;
      else
        pullback = D.transpose() * dm.target.metric(dm.barycenter_value(f)) * D;
      double t = (dm.mesh->face_metric_inv[f] * pullback).trace();
      vals[f] = std::pow(1.0 + t, alpha) * dm.mesh->face_metric[f] -
                2.0 * alpha * std::pow(1.0 + t, alpha - 1.0) * pullback;
    }
    return SymmetricTensorField::on_faces(std::move(vals));
  }
  AnalyticMap am = map.analytic();
  return SymmetricTensorField::analytic(
      [am, alpha](int c, const Vec& u) { return stress_energy_at(am, alpha, c, u); });
}

double stress_energy_trace(const AnalyticMap& map, double alpha, int chart, const Vec& u) {
  Mat S = stress_energy_at(map, alpha, chart, u);
  return (map.domain->metric_inv(chart, u) * S).trace();
}

double div_stress_energy_at(const AnalyticMap& map, double alpha, const DomainVectorField& Y,
                            int chart, const Vec& u) {
  /* nabla_i S follows from nabla_i M alone:
   *   S = (1+t)^a g - 2a (1+t)^(a-1) M,  t = tr(g^-1 M),  d_i t = tr(g^-1 nabla_i M),
   *   nabla_i S = a (1+t)^(a-1) t_i g
   *             - 2a (a-1) (1+t)^(a-2) t_i M - 2a (1+t)^(a-1) nabla_i M. */
  const Chart& ch = map.domain->charts[chart];
  int m = ch.dim;
  int n = map.target.dim();
  PullbackDeriv pd = pullback_deriv(map, chart, u);
  Mat g = map.domain->metric(chart, u);
  Mat ginv = map.domain->metric_inv(chart, u);
  double t = n * pd.mu2;
  double p1 = std::pow(1.0 + t, alpha - 1.0);
  double p2 = std::pow(1.0 + t, alpha - 2.0);
  Vec Yv = Y(chart, u);
  double out = 0;
  for (int i = 0; i < m; ++i) {
    double ti = n * pd.dmu2[i];
    Mat covS = alpha * p1 * ti * g - 2.0 * alpha * (alpha - 1.0) * p2 * ti * pd.M -
               2.0 * alpha * p1 * pd.covM[i];
    for (int j = 0; j < m; ++j) {
      if (ginv(i, j) == 0) continue;
      out += ginv(i, j) * covS.row(j).dot(Yv);
    }
  }
  return out;
}

StressDivergenceReport check_stress_divergence(const AnalyticMap& map, double alpha,
                                               const std::vector<DomainVectorField>& fields) {
  if (fields.empty()) fail("check_stress_divergence needs at least one vector field");
  StressDivergenceReport rep;
  int m = map.domain->dim();
  for (size_t c = 0; c < map.domain->charts.size(); ++c) {
    const QuadratureRule& rule = map.domain->rules[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      int ci = static_cast<int>(c);
      Vec tau_a = alpha_tension_at(map, alpha, ci, u);
      Mat J = map.dpsi(ci, u);
      Mat H = map.target.euclidean_coords()
                  ? Mat(Mat::Identity(J.rows(), J.rows()))
                  : map.target.metric(map.psi(ci, u));
      for (const auto& Y : fields) {
        double lhs = div_stress_energy_at(map, alpha, Y, ci, u);
        double rhs = -tau_a.dot(H * (J * Y(ci, u)));
        double r = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
        rep.max_residual = std::max(rep.max_residual, r);
      }
      double t = map.energy_density(ci, u);
      double tr = stress_energy_trace(map, alpha, ci, u);
      double closed = m * std::pow(1.0 + t, alpha) - 2.0 * alpha * std::pow(1.0 + t, alpha - 1.0) * t;
      rep.max_trace_residual =
          std::max(rep.max_trace_residual, std::abs(tr - closed) / (1.0 + std::abs(closed)));
    }
  }
  return rep;
}

SubmersionMap::SubmersionMap(AnalyticMap map) : map_(std::move(map)) {
  if (map_.target.dim() >= map_.domain->dim())
    fail("submersion needs target dimension below domain dimension");
}

double SubmersionMap::dilation_sq(int chart, const Vec& u, double conformal_tol) const {
  Mat M = pullback_matrix(map_, chart, u);
  Mat g = map_.domain->metric(chart, u);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(M, g);
  if (es.info() != Eigen::Success) fail("dilation eigensolve failed");
  Vec lam = es.eigenvalues(); // ascending
  int m = domain_dim(), n = target_dim();
  /* The zero eigenvalues of the vertical space are computed only to roundoff
   * relative to lam_max, so the kernel cut must scale with the spectrum. */
  double cut = kKernelTol * (1.0 + std::max(0.0, lam[m - 1]));
  int rank = 0;
  for (int i = 0; i < m; ++i)
    if (lam[i] > cut) ++rank;
  if (rank != n)
    fail("map is not a submersion onto the target: dpsi rank %d, target dimension %d", rank, n);
  double lo = lam[m - n], hi = lam[m - 1];
  double mu2 = 0;
  for (int i = m - n; i < m; ++i) mu2 += lam[i];
  mu2 /= n;
  if (hi - lo > conformal_tol * (1.0 + mu2))
    fail("map is not horizontally conformal: eigenvalue spread %.3g at mu^2 = %.3g",
         hi - lo, mu2);
  if (n < m) {
    double top_kernel = lam[m - n - 1];
    if (std::abs(top_kernel) > kKernelTol * (1.0 + mu2))
      fail("kernel of dpsi is not clean (eigenvalue %.3g)", top_kernel);
  }
  return mu2;
}

Mat SubmersionMap::vertical_projector(int chart, const Vec& u) const {
  /* For a horizontally conformal submersion, g^-1 M has eigenvalues mu^2 (on
   * the horizontal space) and 0 (vertical), so the horizontal projector is
   * g^-1 M / mu^2; this closed form keeps the field smooth for stencils. */
  Mat M = pullback_matrix(map_, chart, u);
  Mat g = map_.domain->metric(chart, u);
  Mat giM = g.llt().solve(M);
  double mu2 = giM.trace() / target_dim();
  if (!(mu2 > 0)) fail("dilation vanished; map is degenerate at this point");
  int m = domain_dim();
  return Mat::Identity(m, m) - giM / mu2;
}

std::pair<Vec, Vec> SubmersionMap::hv_split(int chart, const Vec& u, const Vec& X) const {
  (void)dilation_sq(chart, u); // verifies submersion + conformality
  Mat P = vertical_projector(chart, u);
  Vec v = P * X;
  return {v, X - v};
}

namespace {

/* W^k = g^{ij} (nabla_i P)^k_j for P = I - g^-1 M / mu^2, assembled from
 * nabla M (nabla g = 0, so nabla_i (g^-1 M) = g^-1 nabla_i M). */
Vec projector_divergence(const SubmersionMap& sub, int chart, const Vec& u) {
  const AnalyticMap& map = sub.map();
  int m = map.domain->charts[chart].dim;
  PullbackDeriv pd = pullback_deriv(map, chart, u);
  if (!(pd.mu2 > 0)) fail("dilation vanished; map is degenerate at this point");
  Mat ginv = map.domain->metric_inv(chart, u);
  Mat Q = ginv * pd.M;
  Vec W = Vec::Zero(m);
  for (int i = 0; i < m; ++i) {
    Mat covP = -(ginv * pd.covM[i]) / pd.mu2 + Q * (pd.dmu2[i] / (pd.mu2 * pd.mu2));
    for (int j = 0; j < m; ++j) {
      if (ginv(i, j) == 0) continue;
      W += ginv(i, j) * covP.col(j);
    }
  }
  return W;
}

} // namespace

Vec SubmersionMap::fiber_mean_curvature(int chart, const Vec& u) const {
  Vec W = projector_divergence(*this, chart, u);
  Mat P = vertical_projector(chart, u);
  return (W - P * W) / fiber_dim();
}

Vec SubmersionMap::horizontal_mean_curvature(int chart, const Vec& u) const {
  Vec W = projector_divergence(*this, chart, u);
  Mat P = vertical_projector(chart, u);
  return -(P * W) / target_dim();
}

Vec SubmersionMap::grad_dilation_sq(int chart, const Vec& u) const {
  PullbackDeriv pd = pullback_deriv(map_, chart, u);
  return map_.domain->metric_inv(chart, u) * pd.dmu2;
}

Vec SubmersionMap::horizontal_mean_curvature_via_dilation(int chart, const Vec& u) const {
  Mat M = pullback_matrix(map_, chart, u);
  Mat g = map_.domain->metric(chart, u);
  double mu2 = g.llt().solve(M).trace() / target_dim();
  Vec grad = grad_dilation_sq(chart, u);
  Mat P = vertical_projector(chart, u);
  return (P * grad) / (2.0 * mu2);
}

MinimalFiberReport check_minimal_fibers(const SubmersionMap& sub, double alpha,
                                        double vanish_tol, double harmonic_tol) {
  MinimalFiberReport rep;
  rep.m = sub.domain_dim();
  rep.n = sub.target_dim();
  rep.q = sub.fiber_dim();
  if (rep.q < 1) fail("check_minimal_fibers needs positive fiber dimension");
  rep.alpha_tension_l2 = alpha_tension_l2_norm(MapState(sub.map()), alpha);
  if (!(rep.n > 2.0 * alpha)) {
    rep.hypotheses_ok = false;
    rep.hypothesis_message = strformat(
        "criterion needs n > 2 alpha; here n = %d, 2 alpha = %.17g", rep.n, 2.0 * alpha);
  } else if (rep.alpha_tension_l2 > harmonic_tol) {
    rep.hypotheses_ok = false;
    rep.hypothesis_message = strformat("map is not alpha-harmonic (tension L2 %.3g > %.3g)",
                                       rep.alpha_tension_l2, harmonic_tol);
  } else {
    rep.hypotheses_ok = true;
  }

  const AnalyticDomain& dom = *sub.map().domain;
  for (size_t c = 0; c < dom.charts.size(); ++c) {
    const QuadratureRule& rule = dom.rules[c];
    for (long qn = 0; qn < rule.weights.size(); ++qn) {
      Vec u = rule.nodes.row(qn);
      int ci = static_cast<int>(c);
      Mat g = dom.metric(ci, u);
      double mu2 = sub.dilation_sq(ci, u);
      Vec H = sub.fiber_mean_curvature(ci, u);
      Mat P = sub.vertical_projector(ci, u);
      Vec grad = sub.grad_dilation_sq(ci, u);
      Vec gradH = grad - P * grad;
      auto gnorm = [&](const Vec& X) { return std::sqrt(std::max(0.0, X.dot(g * X))); };
      rep.max_fiber_mean_curvature = std::max(rep.max_fiber_mean_curvature, gnorm(H));
      rep.max_horizontal_grad = std::max(rep.max_horizontal_grad, gnorm(gradH));
      double n = rep.n, m = rep.m;
      Vec balance =
          alpha * std::pow(1.0 + n * mu2, alpha - 2.0) * ((n - 2.0) + n * mu2 * (n - 2.0 * alpha)) *
              gradH +
          2.0 * (m - n) * alpha * mu2 * std::pow(1.0 + n * mu2, alpha - 1.0) * H;
      rep.max_balance_residual = std::max(rep.max_balance_residual, gnorm(balance));
    }
  }
  rep.fibers_minimal = rep.max_fiber_mean_curvature < vanish_tol;
  rep.horizontal_grad_zero = rep.max_horizontal_grad < vanish_tol;
  /* The iff only binds under the hypotheses; without them the geometry is
   * still measured but no equivalence is claimed. */
  rep.equivalence_consistent =
      !rep.hypotheses_ok || (rep.fibers_minimal == rep.horizontal_grad_zero);
  return rep;
}

} // namespace aharm
