#include "aharm/catalog.hpp"

#include <cmath>

namespace aharm {
namespace catalog {

namespace {

std::vector<Mat> zero_gamma(int m) {
  return std::vector<Mat>(m, Mat::Zero(m, m));
}

DomainPtr finish_domain(std::string name, Chart chart, const std::vector<int>& nodes) {
  auto dom = std::make_shared<AnalyticDomain>();
  dom->name = std::move(name);
  dom->charts.push_back(std::move(chart));
  dom->rules.push_back(tensor_rule(dom->charts[0], nodes));
  return dom;
}

} // namespace

Vec embed_s2(const Vec& u) {
  double st = std::sin(u[0]), ct = std::cos(u[0]);
  double sp = std::sin(u[1]), cp = std::cos(u[1]);
  Vec p(3);
  p << st * cp, st * sp, ct;
  return p;
}

Mat embed_s2_jac(const Vec& u) {
  double st = std::sin(u[0]), ct = std::cos(u[0]);
  double sp = std::sin(u[1]), cp = std::cos(u[1]);
  Mat J(3, 2);
  J << ct * cp, -st * sp, //
      ct * sp, st * cp,   //
      -st, 0;
  return J;
}

Vec embed_s3(const Vec& u) {
  double sx = std::sin(u[0]), cx = std::cos(u[0]);
  double st = std::sin(u[1]), ct = std::cos(u[1]);
  double sp = std::sin(u[2]), cp = std::cos(u[2]);
  Vec p(4);
  p << sx * st * cp, sx * st * sp, sx * ct, cx;
  return p;
}

Mat embed_s3_jac(const Vec& u) {
  double sx = std::sin(u[0]), cx = std::cos(u[0]);
  double st = std::sin(u[1]), ct = std::cos(u[1]);
  double sp = std::sin(u[2]), cp = std::cos(u[2]);
  Mat J(4, 3);
  J << cx * st * cp, sx * ct * cp, -sx * st * sp, //
      cx * st * sp, sx * ct * sp, sx * st * cp,   //
      cx * ct, -sx * st, 0,                       //
      -sx, 0, 0;
  return J;
}

DomainPtr sphere2_domain(double radius, int n_theta, int n_phi) {
  double R2 = radius * radius;
  Chart ch;
  ch.dim = 2;
  ch.lo = Vec::Zero(2);
  ch.hi = Vec(2);
  ch.hi << kPi, 2.0 * kPi;
  ch.periodic = {false, true};
  ch.metric = [R2](const Vec& u) {
    Mat g = Mat::Zero(2, 2);
    double st = std::sin(u[0]);
    g(0, 0) = R2;
    g(1, 1) = R2 * st * st;
    return g;
  };
  ch.christoffel = [](const Vec& u) {
    double st = std::sin(u[0]), ct = std::cos(u[0]);
    auto gamma = zero_gamma(2);
    gamma[0](1, 1) = -st * ct;
    gamma[1](0, 1) = gamma[1](1, 0) = ct / st;
    return gamma;
  };
  ch.sqrt_det = [R2](const Vec& u) { return R2 * std::abs(std::sin(u[0])); };
  return finish_domain("sphere2", std::move(ch), {n_theta, n_phi});
}

DomainPtr sphere3_domain(double radius, int n_chi, int n_theta, int n_phi) {
  double R2 = radius * radius;
  Chart ch;
  ch.dim = 3;
  ch.lo = Vec::Zero(3);
  ch.hi = Vec(3);
  ch.hi << kPi, kPi, 2.0 * kPi;
  ch.periodic = {false, false, true};
  ch.metric = [R2](const Vec& u) {
    double sx = std::sin(u[0]), st = std::sin(u[1]);
    Mat g = Mat::Zero(3, 3);
    g(0, 0) = R2;
    g(1, 1) = R2 * sx * sx;
    g(2, 2) = R2 * sx * sx * st * st;
    return g;
  };
  ch.christoffel = [](const Vec& u) {
    double sx = std::sin(u[0]), cx = std::cos(u[0]);
    double st = std::sin(u[1]), ct = std::cos(u[1]);
    auto gamma = zero_gamma(3);
    gamma[0](1, 1) = -sx * cx;
    gamma[0](2, 2) = -sx * cx * st * st;
    gamma[1](0, 1) = gamma[1](1, 0) = cx / sx;
    gamma[1](2, 2) = -st * ct;
    gamma[2](0, 2) = gamma[2](2, 0) = cx / sx;
    gamma[2](1, 2) = gamma[2](2, 1) = ct / st;
    return gamma;
  };
  double R3 = R2 * radius;
  ch.sqrt_det = [R3](const Vec& u) {
    double sx = std::sin(u[0]);
    return R3 * sx * sx * std::abs(std::sin(u[1]));
  };
  return finish_domain("sphere3", std::move(ch), {n_chi, n_theta, n_phi});
}

DomainPtr circle_domain(int n) {
  Chart ch;
  ch.dim = 1;
  ch.lo = Vec::Zero(1);
  ch.hi = Vec::Constant(1, 2.0 * kPi);
  ch.periodic = {true};
  ch.metric = [](const Vec&) { return Mat::Identity(1, 1); };
  ch.christoffel = [](const Vec&) { return zero_gamma(1); };
  ch.sqrt_det = [](const Vec&) { return 1.0; };
  return finish_domain("circle", std::move(ch), {n});
}

DomainPtr torus_domain(const Vec& periods, int nodes_per_axis) {
  int m = static_cast<int>(periods.size());
  for (int i = 0; i < m; ++i)
    if (!(periods[i] > 0)) fail("torus periods must be positive");
  Chart ch;
  ch.dim = m;
  ch.lo = Vec::Zero(m);
  ch.hi = periods;
  ch.periodic.assign(m, true);
  ch.metric = [m](const Vec&) { return Mat(Mat::Identity(m, m)); };
  ch.christoffel = [m](const Vec&) { return zero_gamma(m); };
  ch.sqrt_det = [](const Vec&) { return 1.0; };
  return finish_domain("torus", std::move(ch), std::vector<int>(m, nodes_per_axis));
}

DomainPtr warped_circle_sphere_domain(std::function<double(double)> warp,
                                      std::function<double(double)> warp_prime,
                                      int n_t, int n_chi, int n_theta, int n_phi) {
  Chart ch;
  ch.dim = 4;
  ch.lo = Vec::Zero(4);
  ch.hi = Vec(4);
  ch.hi << 2.0 * kPi, kPi, kPi, 2.0 * kPi;
  ch.periodic = {true, false, false, true};
  ch.metric = [warp](const Vec& u) {
    double a2 = warp(u[0]) * warp(u[0]);
    double sx = std::sin(u[1]), st = std::sin(u[2]);
    Mat g = Mat::Zero(4, 4);
    g(0, 0) = 1.0;
    g(1, 1) = a2;
    g(2, 2) = a2 * sx * sx;
    g(3, 3) = a2 * sx * sx * st * st;
    return g;
  };
  ch.christoffel = [warp, warp_prime](const Vec& u) {
    double a = warp(u[0]), ap = warp_prime(u[0]);
    double sx = std::sin(u[1]), cx = std::cos(u[1]);
    double st = std::sin(u[2]), ct = std::cos(u[2]);
    auto gamma = zero_gamma(4);
    gamma[0](1, 1) = -a * ap;
    gamma[0](2, 2) = -a * ap * sx * sx;
    gamma[0](3, 3) = -a * ap * sx * sx * st * st;
    double lp = ap / a;
    for (int i = 1; i < 4; ++i) gamma[i](0, i) = gamma[i](i, 0) = lp;
    gamma[1](2, 2) = -sx * cx;
    gamma[1](3, 3) = -sx * cx * st * st;
    gamma[2](1, 2) = gamma[2](2, 1) = cx / sx;
    gamma[2](3, 3) = -st * ct;
    gamma[3](1, 3) = gamma[3](3, 1) = cx / sx;
    gamma[3](2, 3) = gamma[3](3, 2) = ct / st;
    return gamma;
  };
  ch.sqrt_det = [warp](const Vec& u) {
    double a = warp(u[0]);
    double sx = std::sin(u[1]);
    return a * a * a * sx * sx * std::abs(std::sin(u[2]));
  };
  return finish_domain("warped_circle_sphere", std::move(ch),
                       {n_t, n_chi, n_theta, n_phi});
}

DomainPtr doubly_warped_torus_domain(double alpha, int nodes_per_axis) {
  Chart ch;
  ch.dim = 4;
  ch.lo = Vec::Zero(4);
  ch.hi = Vec::Constant(4, 2.0 * kPi);
  ch.periodic.assign(4, true);
  ch.metric = [alpha](const Vec& u) {
    double s = 1.0 + 0.3 * std::sin(u[0]);
    double gam = std::sqrt(s) * std::pow(1.0 + s, 1.0 - alpha);
    Mat g = Mat::Zero(4, 4);
    g(0, 0) = g(1, 1) = g(2, 2) = 3.0 / s;
    g(3, 3) = gam * gam;
    return g;
  };
  return finish_domain("doubly_warped_torus", std::move(ch),
                       std::vector<int>(4, nodes_per_axis));
}

double warp_reciprocal_sqrt(double t) { return 1.0 / std::sqrt(1.0 + 0.5 * std::sin(t)); }
double warp_reciprocal_sqrt_prime(double t) {
  double b = 1.0 + 0.5 * std::sin(t);
  return -0.25 * std::cos(t) * std::pow(b, -1.5);
}
double warp_slow(double t) { return 2.0 + 0.3 * std::sin(t); }
double warp_slow_prime(double t) { return 0.3 * std::cos(t); }

AnalyticMap identity_s2(DomainPtr dom) {
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(2),
      [](int, const Vec& u) { return embed_s2(u); },
      [](int, const Vec& u) { return embed_s2_jac(u); });
}

AnalyticMap identity_s3(DomainPtr dom) {
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(3),
      [](int, const Vec& u) { return embed_s3(u); },
      [](int, const Vec& u) { return embed_s3_jac(u); });
}

AnalyticMap latitude_stretch_s2(DomainPtr dom, double a) {
  auto reparam = [a](const Vec& u) {
    Vec v = u;
    v[0] = u[0] + a * std::sin(u[0]);
    return v;
  };
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(2),
      [reparam](int, const Vec& u) { return embed_s2(reparam(u)); },
      [reparam, a](int, const Vec& u) {
        Mat J = embed_s2_jac(reparam(u));
        J.col(0) *= 1.0 + a * std::cos(u[0]);
        return J;
      });
}

AnalyticMap chi_stretch_s3(DomainPtr dom, double a) {
  auto reparam = [a](const Vec& u) {
    Vec v = u;
    v[0] = u[0] + a * std::sin(u[0]);
    return v;
  };
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(3),
      [reparam](int, const Vec& u) { return embed_s3(reparam(u)); },
      [reparam, a](int, const Vec& u) {
        Mat J = embed_s3_jac(reparam(u));
        J.col(0) *= 1.0 + a * std::cos(u[0]);
        return J;
      });
}

AnalyticMap twist_s3(DomainPtr dom, double a) {
  auto reparam = [a](const Vec& u) {
    Vec v = u;
    v[2] = u[2] + a * std::cos(u[0]);
    return v;
  };
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(3),
      [reparam](int, const Vec& u) { return embed_s3(reparam(u)); },
      [reparam, a](int, const Vec& u) {
        Mat J = embed_s3_jac(reparam(u));
        J.col(0) -= a * std::sin(u[0]) * J.col(2);
        return J;
      });
}

namespace {

Vec hopf_value(const Vec& x) {
  Vec h(3);
  h << 2.0 * (x[0] * x[2] + x[1] * x[3]), //
      2.0 * (x[1] * x[2] - x[0] * x[3]),  //
      x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
  return h;
}

Mat hopf_jac(const Vec& x) {
  Mat J(3, 4);
  J << x[2], x[3], x[0], x[1],  //
      -x[3], x[2], x[1], -x[0], //
      x[0], x[1], -x[2], -x[3];
  return 2.0 * J;
}

} // namespace

AnalyticMap hopf_map(DomainPtr dom) {
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(2),
      [](int, const Vec& u) { return hopf_value(embed_s3(u)); },
      [](int, const Vec& u) { return Mat(hopf_jac(embed_s3(u)) * embed_s3_jac(u)); });
}

AnalyticMap small_image_s3(DomainPtr dom, double eps) {
  if (!(eps > 0 && eps < 1)) fail("small_image_s3 needs 0 < eps < 1");
  Vec q0 = Vec::Zero(4);
  q0[3] = 1.0;
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(3),
      [q0, eps](int, const Vec& u) {
        Vec F = q0 + eps * embed_s3(u);
        return Vec(F / F.norm());
      },
      [q0, eps](int, const Vec& u) {
        Vec F = q0 + eps * embed_s3(u);
        double r = F.norm();
        Vec n = F / r;
        Mat dF = eps * embed_s3_jac(u);
        return Mat((dF - n * (n.transpose() * dF)) / r);
      });
}

AnalyticMap equator_circle(DomainPtr dom) {
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(2),
      [](int, const Vec& u) {
        Vec p(3);
        p << std::cos(u[0]), std::sin(u[0]), 0.0;
        return p;
      },
      [](int, const Vec& u) {
        Mat J(3, 1);
        J << -std::sin(u[0]), std::cos(u[0]), 0.0;
        return J;
      });
}

AnalyticMap torus3_nonlinear(DomainPtr dom, double a) {
  return AnalyticMap(
      std::move(dom), TargetManifold::flat_torus(3, 2.0 * kPi),
      [a](int, const Vec& u) {
        Vec p(3);
        for (int i = 0; i < 3; ++i) p[i] = u[i] + a * std::sin(u[(i + 1) % 3]);
        return p;
      },
      [a](int, const Vec& u) {
        Mat J = Mat::Identity(3, 3);
        for (int i = 0; i < 3; ++i) J(i, (i + 1) % 3) = a * std::cos(u[(i + 1) % 3]);
        return J;
      });
}

AnalyticMap torus_linear(DomainPtr dom, const Mat& W, const Vec& target_periods) {
  if (W.cols() != dom->dim()) fail("torus_linear: W has %ld columns for dimension %d",
                                   static_cast<long>(W.cols()), dom->dim());
  return AnalyticMap(
      std::move(dom), TargetManifold::flat_torus(target_periods),
      [W](int, const Vec& u) { return Vec(W * u); },
      [W](int, const Vec&) { return W; });
}

AnalyticMap torus_to_disk(DomainPtr dom, double r) {
  if (!(r > 0 && r < 0.7)) fail("torus_to_disk needs 0 < r < 0.7");
  int m = dom->dim();
  if (m < 2) fail("torus_to_disk needs dimension >= 2");
  return AnalyticMap(
      std::move(dom), TargetManifold::hyperbolic_plane(),
      [r](int, const Vec& u) {
        Vec p(2);
        p << r * std::cos(u[0]), r * std::sin(u[1]);
        return p;
      },
      [r, m](int, const Vec& u) {
        Mat J = Mat::Zero(2, m);
        J(0, 0) = -r * std::sin(u[0]);
        J(1, 1) = r * std::cos(u[1]);
        return J;
      });
}

AnalyticMap warped_fiber_submersion(DomainPtr dom) {
  if (dom->dim() != 4) fail("warped_fiber_submersion needs the 4-dimensional warped domain");
  return AnalyticMap(
      std::move(dom), TargetManifold::sphere(3),
      [](int, const Vec& u) { return embed_s3(u.tail(3)); },
      [](int, const Vec& u) {
        Mat J = Mat::Zero(4, 4);
        J.rightCols(3) = embed_s3_jac(u.tail(3));
        return J;
      });
}

AnalyticMap doubly_warped_submersion(DomainPtr dom) {
  if (dom->dim() != 4) fail("doubly_warped_submersion needs the 4-dimensional warped domain");
  return AnalyticMap(
      std::move(dom), TargetManifold::flat_torus(3, 2.0 * kPi),
      [](int, const Vec& u) { return Vec(u.head(3)); },
      [](int, const Vec&) {
        Mat J = Mat::Zero(3, 4);
        J.leftCols(3) = Mat::Identity(3, 3);
        return J;
      });
}

DiscreteMap mesh_sphere_identity(MeshPtr mesh) {
  if (mesh->embed_dim != 3) fail("mesh_sphere_identity needs vertices in R^3");
  std::vector<Vec> values = mesh->vertices;
  TargetManifold target = TargetManifold::sphere(2);
  for (auto& v : values) v = target.project(v);
  return DiscreteMap(std::move(mesh), std::move(target), std::move(values));
}

std::vector<Vec> torus_grid_angles(const DomainMesh& mesh) {
  if (mesh.embed_dim != 4) fail("torus_grid_angles needs the Clifford embedding in R^4");
  std::vector<Vec> out;
  out.reserve(mesh.vertices.size());
  for (const Vec& y : mesh.vertices) {
    Vec u(2);
    u[0] = std::atan2(y[1], y[0]);
    u[1] = std::atan2(y[3], y[2]);
    for (int k = 0; k < 2; ++k)
      if (u[k] < 0) u[k] += 2.0 * kPi;
    out.push_back(u);
  }
  return out;
}

DiscreteMap mesh_torus_map(MeshPtr mesh, TargetManifold target,
                           const std::function<Vec(const Vec&)>& fn) {
  auto angles = torus_grid_angles(*mesh);
  std::vector<Vec> values;
  values.reserve(angles.size());
  for (const Vec& u : angles) values.push_back(target.project(fn(u)));
  return DiscreteMap(std::move(mesh), std::move(target), std::move(values));
}

DiscreteMap mesh_vertex_map(MeshPtr mesh, TargetManifold target,
                            const std::function<Vec(const Vec&)>& fn) {
  std::vector<Vec> values;
  values.reserve(mesh->vertices.size());
  for (const Vec& y : mesh->vertices) values.push_back(target.project(fn(y)));
  return DiscreteMap(std::move(mesh), std::move(target), std::move(values));
}

AnalyticField frame_variation(const AnalyticMap& map, const Vec& L) {
  if (map.target.kind() != TargetManifold::Kind::Sphere)
    fail("frame_variation needs a sphere target");
  if (L.size() != map.target.coord_dim()) fail("frame_variation: wrong vector length");
  auto psi = map.psi;
  auto dpsi = map.dpsi;
  AnalyticField f;
  f.value = [psi, L](int c, const Vec& u) {
    Vec p = psi(c, u);
    return Vec(L - L.dot(p) * p);
  };
  f.jacobian = [psi, dpsi, L](int c, const Vec& u) {
    Vec p = psi(c, u);
    Mat J = dpsi(c, u);
    return Mat(-(p * (L.transpose() * J) + L.dot(p) * J));
  };
  return f;
}

MeshField mesh_frame_variation(const DiscreteMap& map, const Vec& L) {
  if (map.target.kind() != TargetManifold::Kind::Sphere)
    fail("mesh_frame_variation needs a sphere target");
  MeshField f;
  f.values.reserve(map.values.size());
  for (const Vec& p : map.values) f.values.push_back(L - L.dot(p) * p);
  return f;
}

AnalyticField modulated_frame_variation(const AnalyticMap& map, const Vec& L,
                                        const Vec& freq, double shift) {
  AnalyticField base = frame_variation(map, L);
  AnalyticField f;
  f.value = [base, freq, shift](int c, const Vec& u) {
    return Vec(std::cos(freq.dot(u) + shift) * base.value(c, u));
  };
  f.jacobian = [base, freq, shift](int c, const Vec& u) {
    double phase = freq.dot(u) + shift;
    Vec v = base.value(c, u);
    Mat J = std::cos(phase) * base.jacobian(c, u);
    J -= std::sin(phase) * v * freq.transpose();
    return J;
  };
  return f;
}

AnalyticField modulated_constant_variation(const Vec& c, const Vec& freq, double shift) {
  AnalyticField f;
  f.value = [c, freq, shift](int, const Vec& u) {
    return Vec(std::cos(freq.dot(u) + shift) * c);
  };
  f.jacobian = [c, freq, shift](int, const Vec& u) {
    return Mat(-std::sin(freq.dot(u) + shift) * c * freq.transpose());
  };
  return f;
}

} // namespace catalog
} // namespace aharm
