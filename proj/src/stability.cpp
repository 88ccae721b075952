#include "aharm/stability.hpp"

#include "aharm/report.hpp"
#include "aharm/stencil.hpp"
#include "aharm/tangent_basis.hpp"

#include <cmath>
#include <limits>

namespace aharm {

namespace {

double require_alpha(double alpha) {
  if (!(alpha >= 1.0)) fail("alpha must be >= 1, got %.17g", alpha);
  return alpha;
}

/* trace(ginv A^T H B) over chart indices. */
double pair_hs(const Mat& ginv, const Mat& H, const Mat& A, const Mat& B) {
  return (ginv * (A.transpose() * H * B)).trace();
}

Vec trace_curvature(const TargetManifold& target, const Vec& p, const Mat& ginv,
                    const Mat& J, const Vec& v) {
  Vec out = Vec::Zero(p.size());
  int m = static_cast<int>(ginv.rows());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (ginv(i, j) == 0) continue;
      out += ginv(i, j) * target.curvature(p, v, J.col(i), J.col(j));
    }
  return out;
}

struct PointData {
  Vec p;
  Mat J;
  Mat ginv;
  Mat H;
  double t = 0;
  double F1 = 0; // 4a(a-1)(1+t)^(a-2)
  double F2 = 0; // 2a(1+t)^(a-1)
};

PointData point_data(const AnalyticMap& map, double alpha, int c, const Vec& u) {
  PointData d;
  d.p = map.psi(c, u);
  d.J = map.dpsi(c, u);
  d.ginv = map.domain->metric_inv(c, u);
  d.H = map.target.euclidean_coords() ? Mat(Mat::Identity(d.p.size(), d.p.size()))
                                      : map.target.metric(d.p);
  d.t = (d.ginv * (d.J.transpose() * d.H * d.J)).trace();
  d.F1 = 4.0 * alpha * (alpha - 1.0) * std::pow(1.0 + d.t, alpha - 2.0);
  d.F2 = 2.0 * alpha * std::pow(1.0 + d.t, alpha - 1.0);
  return d;
}

} // namespace

double index_form(const AnalyticMap& map, double alpha, const VariationField& v,
                  const VariationField& w) {
  require_alpha(alpha);
  return map.domain->integrate([&](int c, const Vec& u) {
    PointData d = point_data(map, alpha, c, u);
    Mat Cv = field_cov_derivs(map, v, c, u);
    Mat Cw = field_cov_derivs(map, w, c, u);
    Vec va = v.analytic().value(c, u);
    Vec wa = w.analytic().value(c, u);
    double a1 = pair_hs(d.ginv, d.H, Cv, d.J);
    double a2 = pair_hs(d.ginv, d.H, Cw, d.J);
    double cross = pair_hs(d.ginv, d.H, Cv, Cw);
    double curv = trace_curvature(map.target, d.p, d.ginv, d.J, va).dot(d.H * wa);
    return d.F1 * a1 * a2 + d.F2 * (cross - curv);
  });
}

namespace {

struct FaceCtx {
  Vec c;       // barycenter image
  Mat J;       // raw PL differential
  Mat Jt;      // tangent-projected differential (curvature input)
  Mat H;       // target metric at c
  Mat2 ginv;
  double area = 0;
  double F1 = 0, F2 = 0;
  const TargetManifold* target = nullptr;
};

FaceCtx face_ctx(const DiscreteMap& map, double alpha, int f) {
  FaceCtx ctx;
  ctx.target = &map.target;
  ctx.c = map.barycenter_value(f);
  ctx.J = map.face_differential(f);
  ctx.Jt = ctx.J;
  if (map.target.constrained())
    for (int k = 0; k < 2; ++k) ctx.Jt.col(k) = map.target.tangent_project(ctx.c, ctx.J.col(k));
  ctx.H = map.target.metric(ctx.c);
  ctx.ginv = map.mesh->face_metric_inv[f];
  ctx.area = map.mesh->face_area[f];
  double t = (Mat(ctx.ginv) * (ctx.J.transpose() * ctx.H * ctx.J)).trace();
  ctx.F1 = 4.0 * alpha * (alpha - 1.0) * std::pow(1.0 + t, alpha - 2.0);
  ctx.F2 = 2.0 * alpha * std::pow(1.0 + t, alpha - 1.0);
  return ctx;
}

/* Covariant columns of a PL section with barycenter value vc and coordinate
 * difference columns dv. */
Mat face_cov(const FaceCtx& ctx, const Vec& vc, const Mat& dv) {
  Mat out(vc.size(), 2);
  for (int k = 0; k < 2; ++k)
    out.col(k) = ctx.target->cov_deriv(ctx.c, ctx.J.col(k), vc, dv.col(k));
  return out;
}

double face_index(const FaceCtx& ctx, const Vec& vc, const Mat& Cv, const Vec& wc,
                  const Mat& Cw) {
  Mat G = Mat(ctx.ginv);
  double a1 = pair_hs(G, ctx.H, Cv, ctx.J);
  double a2 = pair_hs(G, ctx.H, Cw, ctx.J);
  double cross = pair_hs(G, ctx.H, Cv, Cw);
  Vec vp = ctx.target->tangent_project(ctx.c, vc);
  Vec wp = ctx.target->tangent_project(ctx.c, wc);
  double curv = trace_curvature(*ctx.target, ctx.c, G, ctx.Jt, vp).dot(ctx.H * wp);
  return ctx.area * (ctx.F1 * a1 * a2 + ctx.F2 * (cross - curv));
}

} // namespace

double index_form(const DiscreteMap& map, double alpha, const MeshField& v,
                  const MeshField& w) {
  require_alpha(alpha);
  const DomainMesh& mesh = *map.mesh;
  if (static_cast<int>(v.values.size()) != mesh.num_vertices() ||
      static_cast<int>(w.values.size()) != mesh.num_vertices())
    fail("index_form: field size mismatch");
  double total = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    FaceCtx ctx = face_ctx(map, alpha, f);
    const auto& fc = mesh.faces[f];
    Vec vc = (v.values[fc[0]] + v.values[fc[1]] + v.values[fc[2]]) / 3.0;
    Vec wc = (w.values[fc[0]] + w.values[fc[1]] + w.values[fc[2]]) / 3.0;
    Mat dv(vc.size(), 2), dw(wc.size(), 2);
    dv.col(0) = v.values[fc[1]] - v.values[fc[0]];
    dv.col(1) = v.values[fc[2]] - v.values[fc[0]];
    dw.col(0) = w.values[fc[1]] - w.values[fc[0]];
    dw.col(1) = w.values[fc[2]] - w.values[fc[0]];
    total += face_index(ctx, vc, face_cov(ctx, vc, dv), wc, face_cov(ctx, wc, dw));
  }
  return total;
}

double index_form(const MapState& map, double alpha, const VariationField& v,
                  const VariationField& w) {
  if (map.is_mesh()) return index_form(map.mesh(), alpha, v.mesh(), w.mesh());
  return index_form(map.analytic(), alpha, v, w);
}

std::function<Vec(int, const Vec&)> jacobi_apply(const AnalyticMap& map, double alpha,
                                                 const VariationField& v) {
  require_alpha(alpha);
  if (v.is_mesh()) fail("jacobi_apply needs an analytic variation field");
  AnalyticMap local = map;
  VariationField vf = v;
  return [local, vf, alpha](int c, const Vec& u) -> Vec {
    const Chart& ch = local.domain->charts[c];
    int m = ch.dim;
    PointData d = point_data(local, alpha, c, u);
    Mat Cv = field_cov_derivs(local, vf, c, u);
    Vec va = vf.analytic().value(c, u);

    Vec term1 = d.F2 * trace_curvature(local.target, d.p, d.ginv, d.J, va);

    auto phi = [&](int cc, const Vec& uu) {
      PointData dd = point_data(local, alpha, cc, uu);
      Mat C = field_cov_derivs(local, vf, cc, uu);
      return std::pow(1.0 + dd.t, alpha - 2.0) * pair_hs(dd.ginv, dd.H, C, dd.J);
    };
    Vec grad_phi = grad_scalar(*local.domain, phi, c, u);
    Vec tau = tension_at(local, c, u);
    Vec term2 = 4.0 * alpha * (alpha - 1.0) * (d.J * grad_phi + phi(c, u) * tau);

    auto fscal = [&](int cc, const Vec& uu) {
      return std::pow(1.0 + local.energy_density(cc, uu), alpha - 1.0);
    };
    Vec grad_f = grad_scalar(*local.domain, fscal, c, u);
    Vec cov_gradf_v = Cv * grad_f;

    auto W_at = [&](const Vec& uu) { return field_cov_derivs(local, vf, c, uu); };
    std::vector<Mat> dW(m);
    for (int i = 0; i < m; ++i) dW[i] = deriv5_axis(W_at, u, i, ch.stencil_h);
    auto gamma = local.domain->christoffel(c, u);
    Vec lap = Vec::Zero(d.p.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (d.ginv(i, j) == 0) continue;
        Vec cov_ij = local.target.cov_deriv(d.p, d.J.col(i), Cv.col(j), dW[i].col(j));
        for (int k = 0; k < m; ++k) cov_ij -= gamma[k](i, j) * Cv.col(k);
        lap += d.ginv(i, j) * cov_ij;
      }
    Vec term3 = 2.0 * alpha * (cov_gradf_v + fscal(c, u) * lap);
    return term1 + term2 + term3;
  };
}

double jacobi_duality_residual(const AnalyticMap& map, double alpha, const VariationField& v,
                               const VariationField& w) {
  double I = index_form(map, alpha, v, w);
  auto Jv = jacobi_apply(map, alpha, v);
  double paired = map.domain->integrate([&](int c, const Vec& u) {
    Vec wa = w.analytic().value(c, u);
    Vec jv = Jv(c, u);
    if (map.target.euclidean_coords()) return jv.dot(wa);
    return double(jv.dot(map.target.metric(map.psi(c, u)) * wa));
  });
  return std::abs(I + paired) / (1.0 + std::abs(I));
}

IndexMatrix assemble_index_matrix(const DiscreteMap& map, double alpha) {
  require_alpha(alpha);
  const DomainMesh& mesh = *map.mesh;
  int V = mesh.num_vertices();
  int n = map.target.dim();
  int dofs = V * n;
  IndexMatrix ix;
  ix.n_per_vertex = n;
  ix.A = Mat::Zero(dofs, dofs);
  ix.mass = Vec::Zero(dofs);
  ix.bases.resize(V);
  for (int i = 0; i < V; ++i) {
    ix.bases[i] = tangent_basis(map.target, map.values[i]);
    for (int a = 0; a < n; ++a) ix.mass[i * n + a] = mesh.vertex_mass[i];
  }
  int coord = map.target.coord_dim();
  std::vector<Vec> vc(3 * n);
  std::vector<Mat> cov(3 * n);
  std::vector<double> a1(3 * n);
  std::vector<Vec> curv(3 * n);
  std::vector<Vec> val_proj(3 * n);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    FaceCtx ctx = face_ctx(map, alpha, f);
    const auto& fc = mesh.faces[f];
    Mat G = Mat(ctx.ginv);
    for (int r = 0; r < 3; ++r)
      for (int a = 0; a < n; ++a) {
        const Vec& b = ix.bases[fc[r]][a];
        int ld = r * n + a;
        vc[ld] = b / 3.0;
        Mat dv = Mat::Zero(coord, 2);
        if (r == 0) {
          dv.col(0) = -b;
          dv.col(1) = -b;
        } else {
          dv.col(r - 1) = b;
        }
        cov[ld] = face_cov(ctx, vc[ld], dv);
        a1[ld] = pair_hs(G, ctx.H, cov[ld], ctx.J);
        val_proj[ld] = ctx.target->tangent_project(ctx.c, vc[ld]);
        curv[ld] = trace_curvature(*ctx.target, ctx.c, G, ctx.Jt, val_proj[ld]);
      }
    for (int ld1 = 0; ld1 < 3 * n; ++ld1) {
      int dof1 = fc[ld1 / n] * n + (ld1 % n);
      for (int ld2 = 0; ld2 < 3 * n; ++ld2) {
        int dof2 = fc[ld2 / n] * n + (ld2 % n);
        double cross = pair_hs(G, ctx.H, cov[ld1], cov[ld2]);
        double cterm = curv[ld1].dot(ctx.H * val_proj[ld2]);
        ix.A(dof1, dof2) +=
            ctx.area * (ctx.F1 * a1[ld1] * a1[ld2] + ctx.F2 * (cross - cterm));
      }
    }
  }
  double scale = ix.A.cwiseAbs().maxCoeff();
  ix.symmetry_defect = scale > 0 ? (ix.A - ix.A.transpose()).cwiseAbs().maxCoeff() / scale : 0;
  return ix;
}

MeshField field_from_coeffs(const DiscreteMap& map, const IndexMatrix& ix, const Vec& x) {
  int V = map.mesh->num_vertices(), n = ix.n_per_vertex;
  if (x.size() != V * n) fail("coefficient vector has wrong length");
  MeshField out;
  out.values.assign(V, Vec::Zero(map.target.coord_dim()));
  for (int i = 0; i < V; ++i)
    for (int a = 0; a < n; ++a) out.values[i] += x[i * n + a] * ix.bases[i][a];
  return out;
}

Vec coeffs_from_field(const DiscreteMap& map, const IndexMatrix& ix, const MeshField& v) {
  int V = map.mesh->num_vertices(), n = ix.n_per_vertex;
  if (static_cast<int>(v.values.size()) != V) fail("field has wrong length");
  Vec x = Vec::Zero(V * n);
  for (int i = 0; i < V; ++i) {
    Mat h = map.target.metric(map.values[i]);
    for (int a = 0; a < n; ++a) x[i * n + a] = v.values[i].dot(h * ix.bases[i][a]);
  }
  return x;
}

StabilityReport stability_eigenvalue(const DiscreteMap& map, double /*alpha*/,
                                     const IndexMatrix& ix) {
  for (int i = 0; i < ix.mass.size(); ++i)
    if (!(ix.mass[i] > 0)) fail("mass matrix is not positive definite at dof %d", i);
  Vec inv_sqrt_m = ix.mass.cwiseSqrt().cwiseInverse();
  Mat A = 0.5 * (ix.A + ix.A.transpose());
  Mat B = inv_sqrt_m.asDiagonal() * A * inv_sqrt_m.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success) fail("eigensolver failed");
  StabilityReport rep;
  rep.dofs = static_cast<int>(ix.mass.size());
  rep.lambda_min = es.eigenvalues()[0];
  Vec z = inv_sqrt_m.asDiagonal() * es.eigenvectors().col(0);
  rep.mode = field_from_coeffs(map, ix, z);
  return rep;
}

StabilityReport stability_eigenvalue(const DiscreteMap& map, double alpha) {
  IndexMatrix ix = assemble_index_matrix(map, alpha);
  return stability_eigenvalue(map, alpha, ix);
}

namespace {

MapState deform(const MapState& map, const VariationField& v, double s) {
  if (map.is_mesh()) {
    DiscreteMap dm = map.mesh();
    const auto& vals = v.mesh().values;
    if (vals.size() != dm.values.size()) fail("deform: field size mismatch");
    for (size_t i = 0; i < dm.values.size(); ++i)
      dm.values[i] = dm.target.project(dm.values[i] + s * vals[i]);
    return MapState(std::move(dm));
  }
  const AnalyticMap& am = map.analytic();
  VariationField vf = v;
  auto psi0 = am.psi;
  auto dpsi0 = am.dpsi;
  DomainPtr dom = am.domain;
  if (am.target.kind() == TargetManifold::Kind::Sphere) {
    auto psi_s = [psi0, vf, s](int c, const Vec& u) {
      Vec F = psi0(c, u) + s * vf.analytic().value(c, u);
      return Vec(F / F.norm());
    };
    auto dpsi_s = [psi0, dpsi0, vf, s, dom](int c, const Vec& u) {
      Vec F = psi0(c, u) + s * vf.analytic().value(c, u);
      Mat dF = dpsi0(c, u) + s * vf.jacobian(c, u, dom->charts[c].stencil_h);
      double r = F.norm();
      Vec nrm = F / r;
      return Mat((dF - nrm * (nrm.transpose() * dF)) / r);
    };
    return MapState(AnalyticMap(am.domain, am.target, psi_s, dpsi_s));
  }
  auto psi_s = [psi0, vf, s](int c, const Vec& u) {
    return Vec(psi0(c, u) + s * vf.analytic().value(c, u));
  };
  auto dpsi_s = [dpsi0, vf, s, dom](int c, const Vec& u) {
    return Mat(dpsi0(c, u) + s * vf.jacobian(c, u, dom->charts[c].stencil_h));
  };
  return MapState(AnalyticMap(am.domain, am.target, psi_s, dpsi_s));
}

} // namespace

double fd_second_variation(const MapState& map, double alpha, const VariationField& v,
                           double step) {
  require_alpha(alpha);
  if (!(step > 0)) fail("fd step must be positive");
  double e0 = alpha_energy(map, alpha);
  auto second_diff = [&](double h) {
    double ep = alpha_energy(deform(map, v, h), alpha);
    double em = alpha_energy(deform(map, v, -h), alpha);
    return (ep - 2.0 * e0 + em) / (h * h);
  };
  double d1 = second_diff(step);
  double d2 = second_diff(0.5 * step);
  return (4.0 * d2 - d1) / 3.0;
}

std::vector<Vec> sphere_frame(int coord_dim) {
  std::vector<Vec> frame;
  for (int k = 0; k < coord_dim; ++k) {
    Vec e = Vec::Zero(coord_dim);
    e[k] = 1.0;
    frame.push_back(e);
  }
  return frame;
}

Vec tangential_part(const Vec& L, const Vec& p) { return L - L.dot(p) * p; }

namespace {

AnalyticField lambda_field(const AnalyticMap& map, const Vec& L) {
  auto psi0 = map.psi;
  auto dpsi0 = map.dpsi;
  AnalyticField f;
  f.value = [psi0, L](int c, const Vec& u) {
    Vec p = psi0(c, u);
    return Vec(L - L.dot(p) * p);
  };
  f.jacobian = [psi0, dpsi0, L](int c, const Vec& u) {
    Vec p = psi0(c, u);
    Mat J = dpsi0(c, u);
    return Mat(-(p * (L.transpose() * J) + L.dot(p) * J));
  };
  return f;
}

} // namespace

FrameIdentityReport check_parallel_field_identities(const AnalyticMap& map) {
  if (map.target.kind() != TargetManifold::Kind::Sphere)
    fail("parallel-frame identities apply to sphere targets");
  FrameIdentityReport rep;
  auto frame = sphere_frame(map.target.coord_dim());
  for (size_t c = 0; c < map.domain->charts.size(); ++c) {
    const QuadratureRule& rule = map.domain->rules[c];
    const Chart& ch = map.domain->charts[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      int ci = static_cast<int>(c);
      Vec p = map.psi(ci, u);
      Mat J = map.dpsi(ci, u);
      for (const Vec& L : frame) {
        VariationField vf{lambda_field(map, L)};
        Mat Cv = field_cov_derivs(map, vf, ci, u);
        Vec v = vf.analytic().value(ci, u);
        double Lp = L.dot(p);
        for (int i = 0; i < ch.dim; ++i) {
          Vec X = J.col(i);
          Vec lhs = Cv.col(i);
          Vec rhs = map.target.shape_operator(p, Vec(Lp * p), X);
          rep.max_cov_residual = std::max(
              rep.max_cov_residual, (lhs - rhs).norm() / (1.0 + rhs.norm()));
          double lhs2 = lhs.dot(X), rhs2 = -X.squaredNorm() * Lp;
          rep.max_pairing_residual = std::max(rep.max_pairing_residual,
                                              std::abs(lhs2 - rhs2) / (1.0 + std::abs(rhs2)));
          double lhs3 = lhs.squaredNorm(), rhs3 = X.squaredNorm() * Lp * Lp;
          rep.max_norm_residual =
              std::max(rep.max_norm_residual, std::abs(lhs3 - rhs3) / (1.0 + std::abs(rhs3)));
          double lhs4 = map.target.curvature(p, v, X, X).dot(v);
          double rhs4 = X.squaredNorm() * v.squaredNorm() - std::pow(X.dot(L), 2);
          rep.max_curvature_residual = std::max(
              rep.max_curvature_residual, std::abs(lhs4 - rhs4) / (1.0 + std::abs(rhs4)));
        }
      }
    }
  }
  return rep;
}

double frame_integrand(double t, double alpha, int n) {
  return 2.0 * alpha * t * std::pow(1.0 + t, alpha - 2.0) *
         ((2.0 - n) + (2.0 * alpha - n) * t);
}

FrameIndexSum frame_index_sum(const MapState& map, double alpha, double harmonic_tol) {
  require_alpha(alpha);
  if (map.target().kind() != TargetManifold::Kind::Sphere)
    fail("frame index sum applies to sphere targets");
  int n = map.target().dim();
  FrameIndexSum out;
  out.tension_norm = alpha_tension_l2_norm(map, alpha);
  if (out.tension_norm > harmonic_tol)
    fail("frame index sum needs an alpha-harmonic map (tension L2 %.3g > %.3g)",
         out.tension_norm, harmonic_tol);
  auto frame = sphere_frame(map.target().coord_dim());
  double witness = std::numeric_limits<double>::infinity();
  if (map.is_mesh()) {
    const DiscreteMap& dm = map.mesh();
    for (const Vec& L : frame) {
      MeshField v;
      v.values.reserve(dm.values.size());
      for (const Vec& pv : dm.values) v.values.push_back(tangential_part(L, pv));
      double I = index_form(dm, alpha, v, v);
      out.index_path += I;
      double nrm = field_l2_norm(dm, v);
      if (nrm > 1e-8) witness = std::min(witness, I / (nrm * nrm));
    }
    Vec rho(dm.mesh->num_faces());
    for (int f = 0; f < dm.mesh->num_faces(); ++f)
      rho[f] = frame_integrand(dm.energy_density(f), alpha, n);
    out.integral_path = integrate(*dm.mesh, ScalarField::on_faces(rho));
  } else {
    const AnalyticMap& am = map.analytic();
    for (const Vec& L : frame) {
      VariationField v{lambda_field(am, L)};
      double I = index_form(am, alpha, v, v);
      out.index_path += I;
      double nrm = field_l2_norm(am, v);
      if (nrm > 1e-8) witness = std::min(witness, I / (nrm * nrm));
    }
    out.integral_path = am.domain->integrate([&](int c, const Vec& u) {
      return frame_integrand(am.energy_density(c, u), alpha, n);
    });
  }
  out.rayleigh_witness = std::isfinite(witness) ? witness : 0.0;
  out.rel_mismatch = std::abs(out.index_path - out.integral_path) /
                     (1.0 + std::max(std::abs(out.index_path), std::abs(out.integral_path)));
  return out;
}

InstabilityCertificate instability_certificate(const MapState& map, double alpha,
                                               double harmonic_tol) {
  InstabilityCertificate cert;
  int n = map.target().dim();
  cert.bound_meaningful = 2.0 * alpha > n;
  cert.bound = cert.bound_meaningful ? (n - 2.0) / (2.0 * alpha - n) : 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  if (map.is_mesh()) {
    const DiscreteMap& dm = map.mesh();
    for (int f = 0; f < dm.mesh->num_faces(); ++f) {
      double t = dm.energy_density(f);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  } else {
    const AnalyticMap& am = map.analytic();
    for (size_t c = 0; c < am.domain->charts.size(); ++c) {
      const QuadratureRule& rule = am.domain->rules[c];
      for (long q = 0; q < rule.weights.size(); ++q) {
        double t = am.energy_density(static_cast<int>(c), rule.nodes.row(q));
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    }
  }
  cert.max_density = hi;
  cert.min_density = lo;
  bool nonconstant = hi > 1e-10;
  cert.hypothesis = cert.bound_meaningful && nonconstant && hi < cert.bound;
  cert.sum = frame_index_sum(map, alpha, harmonic_tol);
  cert.unstable = cert.sum.index_path < 0;
  cert.consistent = !cert.hypothesis || cert.unstable;
  return cert;
}

std::string coordinate_text(const Mat& A) {
  CsvWriter csv({"row", "col", "value"});
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0)
        csv.row({format_int(i), format_int(j), format_double(A(i, j))});
  return csv.str();
}

} // namespace aharm
