#include "aharm/variational.hpp"

#include "aharm/stencil.hpp"
#include "aharm/tangent_basis.hpp"
#include "aharm/tensors.hpp"

#include <cmath>

namespace aharm {

namespace {

void require_alpha(double alpha) {
  if (!(alpha >= 1.0)) fail("alpha must be >= 1, got %.17g", alpha);
}

/* d(lambda^2)/dc for the Poincare disk metric lambda^2 = 4/(1-|c|^2)^2. */
Vec disk_metric_gradient(const Vec& c) {
  double s = 1.0 - c.squaredNorm();
  return 16.0 * c / (s * s * s);
}

/* Accumulates w_f * d(t_f)/d(psi_r) over faces into G, where the face weight
 * w_f is supplied by `weight(face, t_f)`. */
std::vector<Vec> accumulate_density_gradient(const DiscreteMap& map,
                                             const std::function<double(int, double)>& weight) {
  const DomainMesh& mesh = *map.mesh;
  int V = mesh.num_vertices();
  std::vector<Vec> G(V, Vec::Zero(map.target.coord_dim()));
  const bool flat = map.target.euclidean_coords();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& fc = mesh.faces[f];
    Mat D = map.face_differential(f);
    Mat M = D * mesh.face_metric_inv[f]; // coord_dim x 2
    double q = (D.transpose() * M).trace();
    double lam2 = 1.0, t = q;
    Vec c;
    if (!flat) {
      c = map.barycenter_value(f);
      lam2 = map.target.conformal_scale_sq(c);
      t = lam2 * q;
    }
    double w = weight(f, t);
    Vec g1 = (2.0 * w * lam2) * M.col(0);
    Vec g2 = (2.0 * w * lam2) * M.col(1);
    G[fc[1]] += g1;
    G[fc[2]] += g2;
    G[fc[0]] -= g1 + g2;
    if (!flat) {
      Vec extra = (w * q / 3.0) * disk_metric_gradient(c);
      for (int k = 0; k < 3; ++k) G[fc[k]] += extra;
    }
  }
  return G;
}

/* tau_i = -(1/m_i) h^-1 tangent_project(G_i). */
MeshField mass_normalize(const DiscreteMap& map, std::vector<Vec> G) {
  const DomainMesh& mesh = *map.mesh;
  MeshField out;
  out.values.resize(G.size());
  for (size_t i = 0; i < G.size(); ++i) {
    Vec g = map.target.tangent_project(map.values[i], G[i]);
    if (!map.target.euclidean_coords()) g /= map.target.conformal_scale_sq(map.values[i]);
    out.values[i] = -g / mesh.vertex_mass[i];
  }
  return out;
}

std::vector<std::vector<int>> vertex_faces(const DomainMesh& mesh) {
  std::vector<std::vector<int>> vf(mesh.num_vertices());
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int k = 0; k < 3; ++k) vf[mesh.faces[f][k]].push_back(f);
  return vf;
}

} // namespace

double alpha_energy(const DiscreteMap& map, double alpha) {
  require_alpha(alpha);
  double e = 0;
  for (int f = 0; f < map.mesh->num_faces(); ++f)
    e += map.mesh->face_area[f] * std::pow(1.0 + map.energy_density(f), alpha);
  return e;
}

double alpha_energy(const AnalyticMap& map, double alpha) {
  require_alpha(alpha);
  return map.domain->integrate([&](int c, const Vec& u) {
    return std::pow(1.0 + map.energy_density(c, u), alpha);
  });
}

double alpha_energy(const MapState& map, double alpha) {
  return map.is_mesh() ? alpha_energy(map.mesh(), alpha) : alpha_energy(map.analytic(), alpha);
}

std::vector<Vec> alpha_energy_vertex_gradient(const DiscreteMap& map, double alpha) {
  require_alpha(alpha);
  const DomainMesh& mesh = *map.mesh;
  return accumulate_density_gradient(map, [&](int f, double t) {
    return mesh.face_area[f] * alpha * std::pow(1.0 + t, alpha - 1.0);
  });
}

MeshField tension_field(const DiscreteMap& map) {
  const DomainMesh& mesh = *map.mesh;
  return mass_normalize(
      map, accumulate_density_gradient(
               map, [&](int f, double) { return 0.5 * mesh.face_area[f]; }));
}

MeshField alpha_tension_field(const DiscreteMap& map, double alpha) {
  return mass_normalize(map, alpha_energy_vertex_gradient(map, alpha));
}

Vec tension_at(const AnalyticMap& map, int chart, const Vec& u) {
  const AnalyticDomain& dom = *map.domain;
  int m = dom.charts[chart].dim;
  Mat J = map.dpsi(chart, u);
  auto dd = map.second_differential(chart, u);
  Mat ginv = dom.metric_inv(chart, u);
  auto gamma = dom.christoffel(chart, u);
  Vec L = Vec::Zero(map.target.coord_dim());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (ginv(i, j) == 0) continue;
      Vec term = dd[i].col(j);
      for (int k = 0; k < m; ++k) term -= gamma[k](i, j) * J.col(k);
      L += ginv(i, j) * term;
    }
  Vec p = map.psi(chart, u);
  if (map.target.euclidean_coords()) return map.target.tangent_project(p, L);
  auto gn = map.target.christoffel(p);
  for (int a = 0; a < map.target.coord_dim(); ++a) {
    double s = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s += ginv(i, j) * J.col(i).dot(gn[a] * J.col(j));
    L[a] += s;
  }
  return L;
}

Vec alpha_tension_at(const AnalyticMap& map, double alpha, int chart, const Vec& u) {
  require_alpha(alpha);
  /* t = |dpsi|^2 and its partials come from the covariant pullback data, so
   * d_a F = 2 alpha (alpha-1) (1+t)^(alpha-2) d_a t carries no stencil on
   * assembled quantities. */
  PullbackDeriv pd = pullback_deriv(map, chart, u);
  int n = map.target.dim();
  double t = n * pd.mu2;
  double F = 2.0 * alpha * std::pow(1.0 + t, alpha - 1.0);
  Vec dF = 2.0 * alpha * (alpha - 1.0) * std::pow(1.0 + t, alpha - 2.0) * (n * pd.dmu2);
  Vec gradF = map.domain->metric_inv(chart, u) * dF;
  return F * tension_at(map, chart, u) + map.dpsi(chart, u) * gradF;
}

VariationField tension_field(const MapState& map) {
  if (map.is_mesh()) return VariationField(tension_field(map.mesh()));
  AnalyticMap am = map.analytic();
  AnalyticField f;
  f.value = [am](int c, const Vec& u) { return tension_at(am, c, u); };
  return VariationField(std::move(f));
}

VariationField alpha_tension_field(const MapState& map, double alpha) {
  if (map.is_mesh()) return VariationField(alpha_tension_field(map.mesh(), alpha));
  AnalyticMap am = map.analytic();
  AnalyticField f;
  f.value = [am, alpha](int c, const Vec& u) { return alpha_tension_at(am, alpha, c, u); };
  return VariationField(std::move(f));
}

double tension_l2_norm(const MapState& map) {
  VariationField tau = tension_field(map);
  return map.is_mesh() ? field_l2_norm(map.mesh(), tau.mesh())
                       : field_l2_norm(map.analytic(), tau);
}

double alpha_tension_l2_norm(const MapState& map, double alpha) {
  VariationField tau = alpha_tension_field(map, alpha);
  return map.is_mesh() ? field_l2_norm(map.mesh(), tau.mesh())
                       : field_l2_norm(map.analytic(), tau);
}

double alpha_tension_max_norm(const AnalyticMap& map, double alpha) {
  double worst = 0;
  for (size_t c = 0; c < map.domain->charts.size(); ++c) {
    const QuadratureRule& rule = map.domain->rules[c];
    for (long q = 0; q < rule.weights.size(); ++q) {
      Vec u = rule.nodes.row(q);
      Vec tau = alpha_tension_at(map, alpha, static_cast<int>(c), u);
      double n2 = map.target.euclidean_coords()
                      ? tau.squaredNorm()
                      : double(tau.dot(map.target.metric(map.psi((int)c, u)) * tau));
      worst = std::max(worst, std::sqrt(n2));
    }
  }
  return worst;
}

MeshField fd_energy_gradient(const DiscreteMap& map, double alpha, double step) {
  require_alpha(alpha);
  if (!(step > 0)) fail("fd step must be positive");
  const DomainMesh& mesh = *map.mesh;
  auto vf = vertex_faces(mesh);
  auto local_energy = [&](const DiscreteMap& m, const std::vector<int>& faces) {
    double e = 0;
    for (int f : faces) e += mesh.face_area[f] * std::pow(1.0 + m.energy_density(f), alpha);
    return e;
  };
  DiscreteMap work = map;
  MeshField out;
  out.values.assign(mesh.num_vertices(), Vec::Zero(map.target.coord_dim()));
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    auto basis = tangent_basis(map.target, map.values[i]);
    Vec acc = Vec::Zero(map.target.coord_dim());
    for (const Vec& b : basis) {
      work.values[i] = map.target.project(map.values[i] + step * b);
      double ep = local_energy(work, vf[i]);
      work.values[i] = map.target.project(map.values[i] - step * b);
      double em = local_energy(work, vf[i]);
      acc += ((ep - em) / (2.0 * step)) * b;
      work.values[i] = map.values[i];
    }
    out.values[i] = acc;
  }
  return out;
}

GradCheckReport gradient_consistency(const DiscreteMap& map, double alpha, double step) {
  MeshField fd = fd_energy_gradient(map, alpha, step);
  MeshField tau = alpha_tension_field(map, alpha);
  const DomainMesh& mesh = *map.mesh;
  double num = 0, den = 0, worst = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    Mat h = map.target.metric(map.values[i]);
    Vec diff = fd.values[i] + mesh.vertex_mass[i] * tau.values[i];
    double d2 = diff.dot(h * diff);
    double f2 = fd.values[i].dot(h * fd.values[i]);
    num += d2;
    den += f2;
    if (f2 > 0) worst = std::max(worst, std::sqrt(d2 / f2));
  }
  GradCheckReport rep;
  rep.rel_l2_error = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
  rep.max_rel_error = worst;
  return rep;
}

namespace {

double flow_tension_norm_sq(const DiscreteMap& map, const MeshField& tau) {
  double s = 0;
  for (int i = 0; i < map.mesh->num_vertices(); ++i) {
    double hvv = map.target.euclidean_coords()
                     ? tau.values[i].squaredNorm()
                     : double(tau.values[i].dot(map.target.metric(map.values[i]) *
                                                tau.values[i]));
    s += map.mesh->vertex_mass[i] * hvv;
  }
  return s;
}

/* (1+t2)^a - (1+t1)^a with error proportional to the difference itself, so
 * the line search stays decidable when the decrease is far below the rounding
 * of the total energy. */
double pow1p_diff(double t1, double t2, double alpha) {
  double base = 1.0 + t1;
  double r = (t2 - t1) / base;
  if (std::abs(r) < 0.25) return std::pow(base, alpha) * std::expm1(alpha * std::log1p(r));
  return std::pow(1.0 + t2, alpha) - std::pow(base, alpha);
}

/* 4/(1-|c2|^2)^2 - 4/(1-|c1|^2)^2 where dc = c2 - c1 is the (already exact)
 * barycenter displacement, so the result stays accurate when dc is tiny. */
double disk_scale_diff(const Vec& c1, const Vec& c2, const Vec& dc) {
  double w1 = 1.0 - c1.squaredNorm(), w2 = 1.0 - c2.squaredNorm();
  double dw = -dc.dot(c1 + c2); // = w2 - w1
  return 4.0 * dw * (w2 + w1) / (w1 * w1 * w2 * w2);
}

/* t(b, f) - t(a, f) without cancellation. The edge-delta difference Db - Da
 * is assembled from per-vertex displacements (each subtraction of nearby
 * doubles, hence exact) instead of subtracting the O(1) edge matrices, so the
 * error stays proportional to the displacement itself; torus wrap jumps are
 * reinserted from the directly computed difference. */
double face_density_diff(const DiscreteMap& a, const DiscreteMap& b, int f) {
  const auto& tri = a.mesh->faces[f];
  Mat Da = a.face_differential(f);
  Mat Db = b.face_differential(f);
  const int c = a.target.coord_dim();
  Vec d0 = b.values[tri[0]] - a.values[tri[0]];
  Mat N(c, 2);
  for (int j = 1; j <= 2; ++j) N.col(j - 1) = (b.values[tri[j]] - a.values[tri[j]]) - d0;
  if (a.target.kind() == TargetManifold::Kind::FlatTorus) {
    const Vec& L = a.target.periods();
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < c; ++k) {
        double jump = std::round((N(k, j) - (Db(k, j) - Da(k, j))) / L[k]);
        if (jump != 0.0) N(k, j) -= L[k] * jump;
      }
  }
  const Mat2& ginv = a.mesh->face_metric_inv[f];
  double dk = (Mat(ginv) * (N.transpose() * (Db + Da))).trace();
  if (a.target.kind() != TargetManifold::Kind::Hyperbolic) return dk;
  Vec ca = a.barycenter_value(f), cb = b.barycenter_value(f);
  Vec dc = (d0 + (b.values[tri[1]] - a.values[tri[1]]) + (b.values[tri[2]] - a.values[tri[2]])) / 3.0;
  double ka = (Mat(ginv) * (Da.transpose() * Da)).trace();
  double lb = 1.0 - cb.squaredNorm();
  return (4.0 / (lb * lb)) * dk + disk_scale_diff(ca, cb, dc) * ka;
}

/* E_alpha(b) - E_alpha(a) over a shared mesh, accurate relative to the
 * difference. */
double energy_delta(const DiscreteMap& a, const DiscreteMap& b, double alpha) {
  double sum = 0;
  for (int f = 0; f < a.mesh->num_faces(); ++f) {
    double t1 = a.energy_density(f);
    double dt = face_density_diff(a, b, f);
    sum += a.mesh->face_area[f] * pow1p_diff(t1, t1 + dt, alpha);
  }
  return sum;
}

/* Line-search retraction of v along the update vector m. For sphere targets
 * this rescales the tangential move so |v| is preserved exactly instead of
 * re-normalizing: plain project() re-rounds the radius of every vertex even
 * for a vanishing step, and that rounding changes the energy by ~1e-15, which
 * masks the genuine decreases available near the discrete minimizer. With a
 * radius-preserving move, a zero step returns v bitwise and the line search
 * stays decidable all the way down. */
Vec flow_retract(const TargetManifold& target, const Vec& v, const Vec& m) {
  if (target.kind() == TargetManifold::Kind::Sphere) {
    double a = v.squaredNorm(), b = v.dot(m), d = m.squaredNorm();
    double disc = b * b + a * (a - d);
    if (disc > 0) return ((std::sqrt(disc) - b) / a) * v + m;
  }
  return target.project(v + m);
}

} // namespace

FlowReport minimize_alpha_energy(DiscreteMap& map, double alpha, const FlowOptions& opts) {
  require_alpha(alpha);
  if (opts.max_iters < 0) fail("max_iters must be >= 0");
  FlowReport rep;
  rep.initial_energy = alpha_energy(map, alpha);
  rep.energy_trajectory.push_back(rep.initial_energy);
  double energy = rep.initial_energy;

  std::vector<Vec> prev_values;
  MeshField prev_tau;
  double last_step = opts.initial_step;
  const int V = map.mesh->num_vertices();

  for (int it = 0; it < opts.max_iters; ++it) {
    MeshField tau = alpha_tension_field(map, alpha);
    double delta = flow_tension_norm_sq(map, tau);
    rep.final_tension_norm = std::sqrt(delta);
    if (rep.final_tension_norm <= opts.tension_tol) {
      rep.reason = FlowTermination::TensionBelowTol;
      rep.final_energy = energy;
      rep.iterations = it;
      return rep;
    }

    double step = opts.initial_step;
    if (it > 0) {
      step = std::min(2.0 * last_step, 1e6);
      if (opts.bb_seeding) {
        /* BB1 on the mass inner product: s = step increments, y = gradient
         * increments (gradient = -m tau). */
        double sy = 0, ss = 0;
        for (int i = 0; i < V; ++i) {
          Vec s_i = map.target.coord_delta(map.values[i], prev_values[i]);
          Vec y_i = -(map.mesh->vertex_mass[i] * (tau.values[i] - prev_tau.values[i]));
          Mat h = map.target.metric(map.values[i]);
          ss += s_i.dot(h * s_i);
          sy += s_i.dot(h * y_i);
        }
        if (sy > 1e-300 && std::isfinite(ss / sy)) {
          double bb = ss / sy;
          if (bb > 1e-12 && bb < 1e6) step = bb;
        }
      }
    }

    prev_values = map.values;
    prev_tau = tau;

    DiscreteMap trial = map;
    auto eval_step = [&](double s, DiscreteMap& t) {
      for (int i = 0; i < V; ++i)
        t.values[i] = flow_retract(map.target, prev_values[i], s * tau.values[i]);
      return energy_delta(map, t, alpha);
    };
    auto armijo_ok = [&](double s, double d) { return d <= -opts.armijo_c * s * delta; };

    bool accepted = false;
    bool first_trial = true;
    double de = 0;
    double seed = step;
    while (step > opts.min_step) {
      de = eval_step(step, trial);
      if (armijo_ok(step, de)) {
        accepted = true;
        break;
      }
      first_trial = false;
      step *= opts.backtrack_factor;
    }
    /* A noise-level accepted step can collapse the doubling seed; once that
     * happens backtracking alone can never climb back to the productive step
     * scale, so retry the sweep once from the configured starting step. */
    if (!accepted && seed < opts.initial_step) {
      step = opts.initial_step;
      while (step > seed) {
        de = eval_step(step, trial);
        if (armijo_ok(step, de)) {
          accepted = true;
          break;
        }
        step *= opts.backtrack_factor;
      }
    }
    if (!accepted) {
      rep.reason = FlowTermination::LineSearchFailure;
      rep.final_energy = energy;
      rep.iterations = it;
      return rep;
    }
    if (first_trial) {
      /* The seed itself passed: greedily expand while the decrease improves,
       * so a collapsed or underestimated seed cannot trap the flow at
       * unproductively tiny steps. */
      DiscreteMap probe = map;
      while (step < 1e6) {
        double s2 = 2.0 * step;
        double de2 = eval_step(s2, probe);
        if (!armijo_ok(s2, de2) || de2 >= de) break;
        step = s2;
        de = de2;
        trial.values.swap(probe.values);
      }
    }
    map.values = trial.values;
    energy += de;
    last_step = step;
    rep.energy_trajectory.push_back(energy);
    rep.step_sizes.push_back(step);
  }
  MeshField tau = alpha_tension_field(map, alpha);
  rep.final_tension_norm = std::sqrt(flow_tension_norm_sq(map, tau));
  rep.reason = rep.final_tension_norm <= opts.tension_tol ? FlowTermination::TensionBelowTol
                                                          : FlowTermination::MaxIterations;
  rep.final_energy = energy;
  rep.iterations = opts.max_iters;
  return rep;
}

const char* to_string(FlowTermination t) {
  switch (t) {
    case FlowTermination::TensionBelowTol: return "tension_below_tol";
    case FlowTermination::MaxIterations: return "max_iterations";
    case FlowTermination::LineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

} // namespace aharm
