#include "aharm/calculus.hpp"

#include "aharm/stencil.hpp"

namespace aharm {

Mat differential(const DiscreteMap& map, int face, bool project) {
  Mat D = map.face_differential(face);
  if (project && map.target.constrained()) {
    Vec c = map.barycenter_value(face);
    for (int k = 0; k < D.cols(); ++k) D.col(k) = map.target.tangent_project(c, D.col(k));
  }
  return D;
}

Mat differential(const AnalyticMap& map, int chart, const Vec& u) {
  return map.dpsi(chart, u);
}

double hs_norm_sq(const DiscreteMap& map, int face) { return map.energy_density(face); }

double hs_norm_sq(const AnalyticMap& map, int chart, const Vec& u) {
  return map.energy_density(chart, u);
}

std::vector<Vec> grad_scalar(const DomainMesh& mesh, const Vec& vertex_values) {
  if (vertex_values.size() != mesh.num_vertices())
    fail("grad_scalar: %ld values for %d vertices", (long)vertex_values.size(),
         mesh.num_vertices());
  std::vector<Vec> out(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& fc = mesh.faces[f];
    Vec2 df(vertex_values[fc[1]] - vertex_values[fc[0]],
            vertex_values[fc[2]] - vertex_values[fc[0]]);
    Vec2 coeff = mesh.face_metric_inv[f] * df;
    auto [e1, e2] = mesh.edges(f);
    out[f] = coeff[0] * e1 + coeff[1] * e2;
  }
  return out;
}

Vec grad_scalar(const AnalyticDomain& domain,
                const std::function<double(int, const Vec&)>& f, int chart, const Vec& u) {
  const Chart& ch = domain.charts[chart];
  Vec df(ch.dim);
  for (int a = 0; a < ch.dim; ++a)
    df[a] = deriv5_axis([&](const Vec& v) { return f(chart, v); }, u, a, ch.stencil_h);
  return domain.metric_inv(chart, u) * df;
}

double integrate(const DomainMesh& mesh, const ScalarField& f) {
  switch (f.rep()) {
    case ScalarField::Rep::FaceValues: {
      if (f.values().size() != mesh.num_faces())
        fail("integrate: %ld face values for %d faces", (long)f.values().size(),
             mesh.num_faces());
      double s = 0;
      for (int i = 0; i < mesh.num_faces(); ++i) s += mesh.face_area[i] * f.values()[i];
      return s;
    }
    case ScalarField::Rep::VertexValues: {
      if (f.values().size() != mesh.num_vertices())
        fail("integrate: %ld vertex values for %d vertices", (long)f.values().size(),
             mesh.num_vertices());
      double s = 0;
      for (int i = 0; i < mesh.num_vertices(); ++i) s += mesh.vertex_mass[i] * f.values()[i];
      return s;
    }
    case ScalarField::Rep::Analytic:
      fail("integrate: analytic scalar field over a mesh domain");
  }
  fail("unreachable");
}

double integrate(const AnalyticDomain& domain, const ScalarField& f) {
  if (f.rep() != ScalarField::Rep::Analytic)
    fail("integrate: sampled scalar field over an analytic domain");
  return domain.integrate(f.evaluator());
}

double field_l2_norm(const DiscreteMap& map, const MeshField& v) {
  const DomainMesh& mesh = *map.mesh;
  if (static_cast<int>(v.values.size()) != mesh.num_vertices())
    fail("field_l2_norm: field/vertex count mismatch");
  double s = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    double hvv = map.target.euclidean_coords()
                     ? v.values[i].squaredNorm()
                     : double(v.values[i].dot(map.target.metric(map.values[i]) * v.values[i]));
    s += mesh.vertex_mass[i] * hvv;
  }
  return std::sqrt(s);
}

double field_l2_norm(const AnalyticMap& map, const VariationField& v) {
  const AnalyticField& f = v.analytic();
  double s = map.domain->integrate([&](int c, const Vec& u) {
    Vec val = f.value(c, u);
    if (map.target.euclidean_coords()) return val.squaredNorm();
    return double(val.dot(map.target.metric(map.psi(c, u)) * val));
  });
  return std::sqrt(s);
}

Mat field_cov_derivs(const AnalyticMap& map, const VariationField& v, int chart, const Vec& u) {
  const Chart& ch = map.domain->charts[chart];
  Vec p = map.psi(chart, u);
  Mat J = map.dpsi(chart, u);
  Vec val = v.analytic().value(chart, u);
  Mat dv = v.jacobian(chart, u, ch.stencil_h);
  Mat out(map.target.coord_dim(), ch.dim);
  for (int i = 0; i < ch.dim; ++i)
    out.col(i) = map.target.cov_deriv(p, J.col(i), val, dv.col(i));
  return out;
}

} // namespace aharm
