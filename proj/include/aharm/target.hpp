#pragma once

#include "aharm/types.hpp"

#include <functional>
#include <vector>

namespace aharm {

/* Target manifold N presented in coordinates.
 *
 * Sphere      S^n, unit radius, ambient coordinates in R^(n+1), metric = identity.
 * FlatTorus   R^n / (period_j Z), angle coordinates, metric = identity, wrap-aware deltas.
 * Hyperbolic  Poincare disk chart z in R^2, |z| < 1, metric lambda(z)^2 I with
 *             lambda = 2/(1-|z|^2), curvature -1.
 * Custom      user-supplied embedded manifold via function hooks.
 */
class TargetManifold {
public:
  enum class Kind { Sphere, FlatTorus, Hyperbolic, Custom };

  struct CustomHooks {
    int dim = 0;
    int coord_dim = 0;
    std::function<Vec(const Vec&)> project;
    std::function<Vec(const Vec&, const Vec&)> tangent_project;     // (p, v)
    std::function<Vec(const Vec&, const Vec&, const Vec&, const Vec&)> curvature; // (p,X,Y,Z)
  };

  static TargetManifold sphere(int n);
  static TargetManifold flat_torus(int n, double period = 2.0 * kPi);
  static TargetManifold flat_torus(const Vec& periods);
  static TargetManifold hyperbolic_plane();
  static TargetManifold custom(CustomHooks hooks);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }            // intrinsic dimension n
  int coord_dim() const { return coord_dim_; } // length of coordinate vectors

  /* True when points are constrained to a submanifold of coordinate space and
   * tangency is enforced by orthogonal projection (sphere, custom). Flat
   * targets (torus, disk chart) accept every coordinate vector as tangent. */
  bool constrained() const { return kind_ == Kind::Sphere || kind_ == Kind::Custom; }

  /* True when the coordinate inner product equals the Riemannian metric. */
  bool euclidean_coords() const { return kind_ != Kind::Hyperbolic; }

  Vec project(const Vec& q) const;                      // retraction onto N
  Vec tangent_project(const Vec& p, const Vec& v) const;
  double on_manifold_residual(const Vec& p) const;

  Mat metric(const Vec& p) const;                       // h in coordinates
  double conformal_scale_sq(const Vec& p) const;        // lambda^2 (1 unless hyperbolic)

  /* a - b with torus angle differences wrapped to (-period/2, period/2]. */
  Vec coord_delta(const Vec& a, const Vec& b) const;
  Vec wrap(const Vec& p) const;                         // torus: into [0, period)

  /* Christoffel symbols of the coordinate chart: gamma[a](b,c). Zero except
   * for the hyperbolic chart. Connection on embedded targets is realized by
   * tangent projection instead. */
  std::vector<Mat> christoffel(const Vec& p) const;

  /* Covariant derivative of a section along a curve through p:
   * dp = velocity of psi (coordinates), v = section value, dv = coordinate
   * derivative of the section along the curve. */
  Vec cov_deriv(const Vec& p, const Vec& dp, const Vec& v, const Vec& dv) const;

  /* Curvature operator R(X,Y)Z at p; X, Y, Z must be tangent (checked). */
  Vec curvature(const Vec& p, const Vec& X, const Vec& Y, const Vec& Z) const;

  /* Sphere-only: second fundamental form B(X,Y) = -<X,Y> p and shape operator
   * A^W(X) = -<p,W> X for a normal vector W. */
  Vec second_fundamental_form(const Vec& p, const Vec& X, const Vec& Y) const;
  Vec shape_operator(const Vec& p, const Vec& W, const Vec& X) const;

  const Vec& periods() const { return periods_; }

  static constexpr double kDiskRadiusMax = 1.0 - 1e-9;
  static constexpr double kTangencyTol = 1e-8;

private:
  TargetManifold() = default;
  void require_tangent(const Vec& p, const Vec& X, const char* who) const;

  Kind kind_ = Kind::Sphere;
  int dim_ = 0;
  int coord_dim_ = 0;
  Vec periods_;
  CustomHooks hooks_;
};

} // namespace aharm
