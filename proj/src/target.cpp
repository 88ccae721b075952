#include "aharm/target.hpp"

namespace aharm {

TargetManifold TargetManifold::sphere(int n) {
  if (n < 1) fail("sphere dimension must be >= 1, got %d", n);
  TargetManifold t;
  t.kind_ = Kind::Sphere;
  t.dim_ = n;
  t.coord_dim_ = n + 1;
  return t;
}

TargetManifold TargetManifold::flat_torus(int n, double period) {
  if (n < 1) fail("torus dimension must be >= 1, got %d", n);
  return flat_torus(Vec::Constant(n, period));
}

TargetManifold TargetManifold::flat_torus(const Vec& periods) {
  TargetManifold t;
  t.kind_ = Kind::FlatTorus;
  t.dim_ = static_cast<int>(periods.size());
  t.coord_dim_ = t.dim_;
  for (int i = 0; i < periods.size(); ++i)
    if (!(periods[i] > 0)) fail("torus period %d must be positive", i);
  t.periods_ = periods;
  return t;
}

TargetManifold TargetManifold::hyperbolic_plane() {
  TargetManifold t;
  t.kind_ = Kind::Hyperbolic;
  t.dim_ = 2;
  t.coord_dim_ = 2;
  return t;
}

TargetManifold TargetManifold::custom(CustomHooks hooks) {
  if (hooks.dim < 1 || hooks.coord_dim < hooks.dim)
    fail("custom target needs 1 <= dim <= coord_dim");
  if (!hooks.project || !hooks.tangent_project)
    fail("custom target needs project and tangent_project hooks");
  TargetManifold t;
  t.kind_ = Kind::Custom;
  t.dim_ = hooks.dim;
  t.coord_dim_ = hooks.coord_dim;
  t.hooks_ = std::move(hooks);
  return t;
}

Vec TargetManifold::project(const Vec& q) const {
  switch (kind_) {
    case Kind::Sphere: {
      double r = q.norm();
      if (r < 1e-14) fail("cannot project near-zero vector onto the sphere");
      return q / r;
    }
    case Kind::FlatTorus:
      return wrap(q);
    case Kind::Hyperbolic: {
      double r = q.norm();
      if (r > kDiskRadiusMax) return q * (kDiskRadiusMax / r);
      return q;
    }
    case Kind::Custom:
      return hooks_.project(q);
  }
  fail("unreachable");
}

Vec TargetManifold::tangent_project(const Vec& p, const Vec& v) const {
  switch (kind_) {
    case Kind::Sphere:
      return v - p.dot(v) * p;
    case Kind::FlatTorus:
    case Kind::Hyperbolic:
      return v;
    case Kind::Custom:
      return hooks_.tangent_project(p, v);
  }
  fail("unreachable");
}

double TargetManifold::on_manifold_residual(const Vec& p) const {
  switch (kind_) {
    case Kind::Sphere:
      return std::abs(p.norm() - 1.0);
    case Kind::FlatTorus:
      return 0.0;
    case Kind::Hyperbolic:
      return std::max(0.0, p.norm() - kDiskRadiusMax);
    case Kind::Custom:
      return (hooks_.project(p) - p).norm();
  }
  fail("unreachable");
}

Mat TargetManifold::metric(const Vec& p) const {
  if (kind_ == Kind::Hyperbolic)
    return conformal_scale_sq(p) * Mat::Identity(2, 2);
  (void)p;
  return Mat::Identity(coord_dim_, coord_dim_);
}

double TargetManifold::conformal_scale_sq(const Vec& p) const {
  if (kind_ != Kind::Hyperbolic) return 1.0;
  double s = 1.0 - p.squaredNorm();
  if (s <= 0) fail("hyperbolic point left the unit disk (|z| = %.17g)", p.norm());
  return 4.0 / (s * s);
}

Vec TargetManifold::coord_delta(const Vec& a, const Vec& b) const {
  Vec d = a - b;
  if (kind_ == Kind::FlatTorus) {
    for (int i = 0; i < d.size(); ++i) {
      double L = periods_[i];
      d[i] -= L * std::floor(d[i] / L + 0.5);
    }
  }
  return d;
}

Vec TargetManifold::wrap(const Vec& p) const {
  if (kind_ != Kind::FlatTorus) return p;
  Vec q = p;
  for (int i = 0; i < q.size(); ++i) {
    double L = periods_[i];
    q[i] -= L * std::floor(q[i] / L);
  }
  return q;
}

std::vector<Mat> TargetManifold::christoffel(const Vec& p) const {
  std::vector<Mat> gamma(coord_dim_, Mat::Zero(coord_dim_, coord_dim_));
  if (kind_ == Kind::Hyperbolic) {
    /* Conformal metric e^(2*phi) I with phi = log(2/(1-|z|^2)):
     * gamma^a_bc = d_c(phi) delta_ab + d_b(phi) delta_ac - d_a(phi) delta_bc. */
    double s = 1.0 - p.squaredNorm();
    if (s <= 0) fail("hyperbolic point left the unit disk");
    Vec dphi = 2.0 * p / s;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          double v = 0;
          if (a == b) v += dphi[c];
          if (a == c) v += dphi[b];
          if (b == c) v -= dphi[a];
          gamma[a](b, c) = v;
        }
  }
  return gamma;
}

Vec TargetManifold::cov_deriv(const Vec& p, const Vec& dp, const Vec& v, const Vec& dv) const {
  switch (kind_) {
    case Kind::Sphere:
    case Kind::Custom:
      return tangent_project(p, dv);
    case Kind::FlatTorus:
      return dv;
    case Kind::Hyperbolic: {
      auto gamma = christoffel(p);
      Vec out = dv;
      for (int a = 0; a < coord_dim_; ++a) out[a] += dp.dot(gamma[a] * v);
      return out;
    }
  }
  fail("unreachable");
}

void TargetManifold::require_tangent(const Vec& p, const Vec& X, const char* who) const {
  Vec t = tangent_project(p, X);
  if ((t - X).norm() > kTangencyTol * (1.0 + X.norm()))
    fail("%s: input vector is not tangent (residual %.3g)", who, (t - X).norm());
}

Vec TargetManifold::curvature(const Vec& p, const Vec& X, const Vec& Y, const Vec& Z) const {
  require_tangent(p, X, "curvature");
  require_tangent(p, Y, "curvature");
  require_tangent(p, Z, "curvature");
  switch (kind_) {
    case Kind::Sphere:
      return Y.dot(Z) * X - X.dot(Z) * Y;
    case Kind::FlatTorus:
      return Vec::Zero(coord_dim_);
    case Kind::Hyperbolic:
      return -conformal_scale_sq(p) * (Y.dot(Z) * X - X.dot(Z) * Y);
    case Kind::Custom:
      if (!hooks_.curvature) fail("custom target has no curvature hook");
      return hooks_.curvature(p, X, Y, Z);
  }
  fail("unreachable");
}

Vec TargetManifold::second_fundamental_form(const Vec& p, const Vec& X, const Vec& Y) const {
  if (kind_ != Kind::Sphere) fail("second fundamental form is provided for spheres only");
  require_tangent(p, X, "second_fundamental_form");
  require_tangent(p, Y, "second_fundamental_form");
  return -X.dot(Y) * p;
}

Vec TargetManifold::shape_operator(const Vec& p, const Vec& W, const Vec& X) const {
  if (kind_ != Kind::Sphere) fail("shape operator is provided for spheres only");
  require_tangent(p, X, "shape_operator");
  Vec Wt = tangent_project(p, W);
  if (Wt.norm() > kTangencyTol * (1.0 + W.norm()))
    fail("shape_operator: W must be normal at p (tangent part %.3g)", Wt.norm());
  return -p.dot(W) * X;
}

} // namespace aharm
