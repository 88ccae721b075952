#include "aharm/map.hpp"

#include "aharm/rng.hpp"
#include "aharm/stencil.hpp"

namespace aharm {

DiscreteMap::DiscreteMap(MeshPtr m, TargetManifold t, std::vector<Vec> vals)
    : mesh(std::move(m)), target(std::move(t)), values(std::move(vals)) {
  if (!mesh) fail("DiscreteMap needs a mesh");
  if (static_cast<int>(values.size()) != mesh->num_vertices())
    fail("DiscreteMap has %zu values for %d vertices", values.size(), mesh->num_vertices());
  for (size_t i = 0; i < values.size(); ++i)
    if (static_cast<int>(values[i].size()) != target.coord_dim())
      fail("map value %zu has wrong coordinate count", i);
}

Vec DiscreteMap::barycenter_value(int f) const {
  const auto& fc = mesh->faces[f];
  const Vec& p0 = values[fc[0]];
  Vec d1 = target.coord_delta(values[fc[1]], p0);
  Vec d2 = target.coord_delta(values[fc[2]], p0);
  Vec c = p0 + (d1 + d2) / 3.0;
  if (target.kind() == TargetManifold::Kind::Sphere) return target.project(c);
  return target.wrap(c);
}

Mat DiscreteMap::face_differential(int f) const {
  const auto& fc = mesh->faces[f];
  Mat D(target.coord_dim(), 2);
  D.col(0) = target.coord_delta(values[fc[1]], values[fc[0]]);
  D.col(1) = target.coord_delta(values[fc[2]], values[fc[0]]);
  return D;
}

double DiscreteMap::energy_density(int f) const {
  Mat D = face_differential(f);
  const Mat2& ginv = mesh->face_metric_inv[f];
  if (target.euclidean_coords()) {
    Mat2 G = D.transpose() * D;
    return (ginv * G).trace();
  }
  Mat H = target.metric(barycenter_value(f));
  Mat2 G = D.transpose() * H * D;
  return (ginv * G).trace();
}

double DiscreteMap::on_manifold_residual() const {
  double r = 0;
  for (const auto& v : values) r = std::max(r, target.on_manifold_residual(v));
  return r;
}

void DiscreteMap::validate(double tol) const {
  double r = on_manifold_residual();
  if (r > tol) fail("map leaves the target manifold (residual %.3g > %.3g)", r, tol);
}

AnalyticMap::AnalyticMap(DomainPtr d, TargetManifold t,
                         std::function<Vec(int, const Vec&)> value,
                         std::function<Mat(int, const Vec&)> differential)
    : domain(std::move(d)), target(std::move(t)), psi(std::move(value)),
      dpsi(std::move(differential)) {
  if (!domain || !psi || !dpsi) fail("AnalyticMap needs a domain and evaluators");
}

std::vector<Mat> AnalyticMap::second_differential(int c, const Vec& u) const {
  int m = domain->charts[c].dim;
  /* dpsi is closed-form and smooth, so the step can sit near the
   * fourth-order roundoff/truncation balance; the chart default is sized
   * for differentiating assembled fields. */
  double h = std::min(domain->charts[c].stencil_h, 5e-4);
  std::vector<Mat> dd(m);
  for (int i = 0; i < m; ++i)
    dd[i] = deriv5_axis([&](const Vec& v) { return dpsi(c, v); }, u, i, h);
  return dd;
}

double AnalyticMap::energy_density(int c, const Vec& u) const {
  Mat J = dpsi(c, u);
  Mat ginv = domain->metric_inv(c, u);
  if (target.euclidean_coords()) return (ginv * (J.transpose() * J)).trace();
  Mat H = target.metric(psi(c, u));
  return (ginv * (J.transpose() * H * J)).trace();
}

void AnalyticMap::validate(double fd_tol, int samples, std::uint64_t seed) const {
  Rng rng(seed);
  for (size_t c = 0; c < domain->charts.size(); ++c) {
    const Chart& ch = domain->charts[c];
    const QuadratureRule& rule = domain->rules[c];
    long N = rule.weights.size();
    for (int s = 0; s < samples; ++s) {
      long q = static_cast<long>(rng.uniform() * N);
      if (q >= N) q = N - 1;
      Vec u = rule.nodes.row(q);
      Vec p = psi(static_cast<int>(c), u);
      double res = target.on_manifold_residual(p);
      if (res > 1e-9) fail("analytic map leaves the target (residual %.3g)", res);
      Mat J = dpsi(static_cast<int>(c), u);
      double h = 1e-5;
      for (int a = 0; a < ch.dim; ++a) {
        Vec up = u, um = u;
        up[a] += h;
        um[a] -= h;
        Vec fd = (psi(static_cast<int>(c), up) - psi(static_cast<int>(c), um)) / (2 * h);
        double err = (fd - J.col(a)).norm() / (1.0 + J.col(a).norm());
        if (err > fd_tol)
          fail("analytic differential mismatches finite differences "
               "(chart %zu axis %d err %.3g)", c, a, err);
      }
    }
  }
}

AnalyticMap AnalyticMap::with_domain(DomainPtr d) const {
  AnalyticMap out = *this;
  if (d->charts.size() != domain->charts.size())
    fail("with_domain: chart count mismatch");
  out.domain = std::move(d);
  return out;
}

Mat VariationField::jacobian(int c, const Vec& u, double h) const {
  const AnalyticField& f = analytic();
  if (f.jacobian) return f.jacobian(c, u);
  int m = static_cast<int>(u.size());
  Vec v0 = f.value(c, u);
  Mat J(v0.size(), m);
  for (int a = 0; a < m; ++a)
    J.col(a) = deriv5_axis([&](const Vec& w) { return f.value(c, w); }, u, a, h);
  return J;
}

ScalarField ScalarField::on_faces(Vec values) {
  ScalarField f;
  f.rep_ = Rep::FaceValues;
  f.values_ = std::move(values);
  return f;
}

ScalarField ScalarField::on_vertices(Vec values) {
  ScalarField f;
  f.rep_ = Rep::VertexValues;
  f.values_ = std::move(values);
  return f;
}

ScalarField ScalarField::analytic(std::function<double(int, const Vec&)> fn) {
  ScalarField f;
  f.rep_ = Rep::Analytic;
  f.eval_ = std::move(fn);
  return f;
}

SymmetricTensorField SymmetricTensorField::on_faces(std::vector<Mat2> values) {
  SymmetricTensorField f;
  f.mesh_rep_ = true;
  f.face_values_ = std::move(values);
  return f;
}

SymmetricTensorField SymmetricTensorField::analytic(std::function<Mat(int, const Vec&)> fn) {
  SymmetricTensorField f;
  f.mesh_rep_ = false;
  f.eval_ = std::move(fn);
  return f;
}

DiscreteMap perturb_map(const DiscreteMap& map, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  DiscreteMap out = map;
  for (auto& v : out.values) {
    Vec noise = sigma * rng.normal_vec(map.target.coord_dim());
    if (map.target.kind() == TargetManifold::Kind::Hyperbolic) {
      /* Stay inside the disk: scale the step down near the boundary. */
      noise *= 0.5 * (1.0 - v.norm());
    }
    v = map.target.project(v + map.target.tangent_project(v, noise));
  }
  return out;
}

} // namespace aharm
