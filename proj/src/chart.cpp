#include "aharm/chart.hpp"

#include "aharm/stencil.hpp"

#include <cmath>

namespace aharm {

void gauss_legendre(int n, double a, double b, Vec& nodes, Vec& weights) {
  if (n < 1) fail("gauss_legendre needs n >= 1");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) { p1 = x; }
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pnm1 = (n == 1) ? 1.0 : p0;
      pp = n * (x * pn - pnm1) / (x * x - 1.0);
      double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    nodes[i] = mid - half * x;
    nodes[n - 1 - i] = mid + half * x;
    weights[i] = half * w;
    weights[n - 1 - i] = half * w;
  }
}

QuadratureRule tensor_rule(const Chart& chart, const std::vector<int>& nodes_per_axis) {
  int m = chart.dim;
  if (static_cast<int>(nodes_per_axis.size()) != m)
    fail("tensor_rule: need %d per-axis node counts", m);
  std::vector<Vec> xs(m), ws(m);
  for (int a = 0; a < m; ++a) {
    int n = nodes_per_axis[a];
    if (n < 1) fail("tensor_rule: axis %d has no nodes", a);
    double lo = chart.lo[a], hi = chart.hi[a];
    if (chart.periodic[a]) {
      double h = (hi - lo) / n;
      xs[a].resize(n);
      ws[a].resize(n);
      for (int i = 0; i < n; ++i) {
        xs[a][i] = lo + (i + 0.5) * h;
        ws[a][i] = h;
      }
    } else {
      gauss_legendre(n, lo, hi, xs[a], ws[a]);
    }
  }
  long total = 1;
  for (int a = 0; a < m; ++a) total *= xs[a].size();
  QuadratureRule rule;
  rule.nodes.resize(total, m);
  rule.weights.resize(total);
  std::vector<int> idx(m, 0);
  for (long q = 0; q < total; ++q) {
    double w = 1.0;
    for (int a = 0; a < m; ++a) {
      rule.nodes(q, a) = xs[a][idx[a]];
      w *= ws[a][idx[a]];
    }
    rule.weights[q] = w;
    for (int a = m - 1; a >= 0; --a) {
      if (++idx[a] < xs[a].size()) break;
      idx[a] = 0;
    }
  }
  return rule;
}

std::vector<Mat> christoffel_from_metric(const std::function<Mat(const Vec&)>& metric,
                                         const Vec& u, double h) {
  int m = static_cast<int>(u.size());
  std::vector<Mat> dg(m);
  for (int a = 0; a < m; ++a)
    dg[a] = deriv5_axis([&](const Vec& v) { return metric(v); }, u, a, h);
  Mat ginv = metric(u).inverse();
  std::vector<Mat> gamma(m, Mat::Zero(m, m));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int l = 0; l < m; ++l)
          s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * s;
      }
  return gamma;
}

Mat AnalyticDomain::metric_inv(int c, const Vec& u) const {
  Mat g = charts[c].metric(u);
  return g.llt().solve(Mat::Identity(g.rows(), g.cols()));
}

std::vector<Mat> AnalyticDomain::christoffel(int c, const Vec& u) const {
  const Chart& ch = charts[c];
  if (ch.christoffel) return ch.christoffel(u);
  /* Chart metrics are closed-form, so the step sits near the fourth-order
   * roundoff/truncation balance rather than at the assembled-field default. */
  return christoffel_from_metric(ch.metric, u, std::min(ch.stencil_h, 5e-4));
}

double AnalyticDomain::sqrt_det(int c, const Vec& u) const {
  const Chart& ch = charts[c];
  if (ch.sqrt_det) return ch.sqrt_det(u);
  double d = ch.metric(u).determinant();
  if (!(d > 0)) fail("metric determinant is not positive (det = %.3g)", d);
  return std::sqrt(d);
}

double AnalyticDomain::integrate(const std::function<double(int, const Vec&)>& f) const {
  double total = 0;
  for (size_t c = 0; c < charts.size(); ++c) {
    const QuadratureRule& rule = rules[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      total += rule.weights[q] * sqrt_det(static_cast<int>(c), u) * f(static_cast<int>(c), u);
    }
  }
  return total;
}

double AnalyticDomain::volume() const {
  return integrate([](int, const Vec&) { return 1.0; });
}

std::shared_ptr<const AnalyticDomain> AnalyticDomain::conformal_rescale(
    std::function<double(int, const Vec&)> factor,
    std::function<Vec(int, const Vec&)> dlog_factor) const {
  auto out = std::make_shared<AnalyticDomain>();
  out->name = name + "|rescaled";
  out->rules = rules;
  for (size_t ci = 0; ci < charts.size(); ++ci) {
    const Chart base = charts[ci];
    int c = static_cast<int>(ci);
    int m = base.dim;
    Chart ch = base;
    ch.metric = [base, factor, c](const Vec& u) {
      double f = factor(c, u);
      return Mat((f * f) * base.metric(u));
    };
    auto base_gamma = [this, base, c](const Vec& u) {
      if (base.christoffel) return base.christoffel(u);
      return christoffel_from_metric(base.metric, u, std::min(base.stencil_h, 5e-4));
    };
    std::function<Vec(const Vec&)> dlogf;
    if (dlog_factor) {
      dlogf = [dlog_factor, c](const Vec& u) { return dlog_factor(c, u); };
    } else {
      // The factor is closed-form along with the chart data; refined step.
      double h = std::min(base.stencil_h, 5e-4);
      dlogf = [factor, c, h, m](const Vec& u) {
        Vec d(m);
        for (int a = 0; a < m; ++a)
          d[a] = deriv5_axis([&](const Vec& v) { return std::log(factor(c, v)); }, u, a, h);
        return d;
      };
    }
    /* gamma-bar^k_ij = gamma^k_ij + delta^k_i d_j(log f) + delta^k_j d_i(log f)
     *                  - g_ij g^kl d_l(log f). */
    ch.christoffel = [base, base_gamma, dlogf, m](const Vec& u) {
      std::vector<Mat> gamma = base_gamma(u);
      Vec dl = dlogf(u);
      Mat g = base.metric(u);
      Vec raised = g.llt().solve(dl);
      for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double v = gamma[k](i, j);
            if (k == i) v += dl[j];
            if (k == j) v += dl[i];
            v -= g(i, j) * raised[k];
            gamma[k](i, j) = v;
          }
      return gamma;
    };
    if (base.sqrt_det) {
      auto bsd = base.sqrt_det;
      ch.sqrt_det = [bsd, factor, c, m](const Vec& u) {
        return std::pow(factor(c, u), m) * bsd(u);
      };
    } else {
      ch.sqrt_det = [base, factor, c, m](const Vec& u) {
        double d = base.metric(u).determinant();
        if (!(d > 0)) fail("metric determinant is not positive");
        return std::pow(factor(c, u), m) * std::sqrt(d);
      };
    }
    out->charts.push_back(std::move(ch));
  }
  return out;
}

} // namespace aharm
