#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aharm/catalog.hpp"
#include "aharm/tensors.hpp"
#include "aharm/variational.hpp"

#include <cmath>

using namespace aharm;
using namespace aharm::catalog;

namespace {

std::vector<DomainVectorField> trig_fields(int dim, int count) {
  std::vector<DomainVectorField> out;
  for (int k = 0; k < count; ++k) {
    out.push_back([dim, k](int, const Vec& u) {
      Vec Y(dim);
      for (int i = 0; i < dim; ++i) {
        double s = u[(i + k) % dim] + 0.15 * k + 0.35 * i;
        Y[i] = ((i + k) % 2 == 0) ? std::sin(s) : std::cos(s);
      }
      return Y;
    });
  }
  return out;
}

} // namespace

TEST_CASE("stress-energy trace matches its closed form") {
  DomainPtr s2 = sphere2_domain(1.0, 12, 24);
  AnalyticMap map = latitude_stretch_s2(s2, 0.2);
  Vec u(2);
  u << 0.9, 1.7;
  for (double a : {1.5, 2.0, 3.0}) {
    double t = map.energy_density(0, u);
    double expect = 2.0 * std::pow(1.0 + t, a) - 2.0 * a * std::pow(1.0 + t, a - 1.0) * t;
    CHECK(stress_energy_trace(map, a, 0, u) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("stress-energy divergence pairs with the alpha-tension") {
  DomainPtr s2 = sphere2_domain(1.0, 16, 32);
  AnalyticMap stretch = latitude_stretch_s2(s2, 0.2);
  DomainPtr t3 = torus_domain(Vec::Constant(3, 2.0 * kPi), 8);
  AnalyticMap tor = torus3_nonlinear(t3, 0.2);
  for (double a : {1.5, 2.0, 3.0}) {
    StressDivergenceReport r1 =
        check_stress_divergence(stretch, a, trig_fields(2, 2));
    CHECK(r1.max_residual < 1e-8);
    CHECK(r1.max_trace_residual < 1e-12);
    StressDivergenceReport r2 = check_stress_divergence(tor, a, trig_fields(3, 2));
    CHECK(r2.max_residual < 1e-8);
    CHECK(r2.max_trace_residual < 1e-12);
  }
}

TEST_CASE("covariant pullback data differentiates the dilation") {
  DomainPtr s2 = sphere2_domain(1.0, 12, 24);
  AnalyticMap map = latitude_stretch_s2(s2, 0.3);
  Vec u(2);
  u << 1.2, 0.4;
  PullbackDeriv pd = pullback_deriv(map, 0, u);
  CHECK(2.0 * pd.mu2 == doctest::Approx(map.energy_density(0, u)).epsilon(1e-12));
  // central difference of the scalar t = 2 mu^2 against dmu2
  double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    Vec up = u, um = u;
    up[i] += h;
    um[i] -= h;
    double fd = (map.energy_density(0, up) - map.energy_density(0, um)) / (2.0 * h);
    CHECK(2.0 * pd.dmu2[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("hopf map is a horizontally conformal submersion with dilation four") {
  DomainPtr s3 = sphere3_domain(1.0, 10, 10, 20);
  SubmersionMap sub(hopf_map(s3));
  CHECK(sub.fiber_dim() == 1);
  double worst_mu = 0, worst_H = 0, worst_two_path = 0;
  const QuadratureRule& rule = s3->rules[0];
  for (long q = 0; q < rule.weights.size(); ++q) {
    Vec u = rule.nodes.row(q);
    worst_mu = std::max(worst_mu, std::abs(sub.dilation_sq(0, u) - 4.0));
    Mat g = s3->metric(0, u);
    Vec H = sub.fiber_mean_curvature(0, u);
    worst_H = std::max(worst_H, std::sqrt(H.dot(g * H)));
    Vec d = sub.horizontal_mean_curvature(0, u) -
            sub.horizontal_mean_curvature_via_dilation(0, u);
    worst_two_path = std::max(worst_two_path, std::sqrt(d.dot(g * d)));
  }
  CHECK(worst_mu < 1e-8);
  CHECK(worst_H < 1e-8);
  CHECK(worst_two_path < 1e-8);
}

TEST_CASE("vertical and horizontal parts split orthogonally") {
  DomainPtr s3 = sphere3_domain(1.0, 8, 8, 16);
  SubmersionMap sub(hopf_map(s3));
  Vec u(3);
  u << 1.0, 0.8, 2.1;
  Vec X(3);
  X << 0.3, -1.1, 0.7;
  auto [v, h] = sub.hv_split(0, u, X);
  CHECK((v + h - X).norm() < 1e-12);
  Mat g = s3->metric(0, u);
  CHECK(std::abs(v.dot(g * h)) < 1e-10);
  // dpsi kills the vertical part
  AnalyticMap map = hopf_map(s3);
  CHECK((map.dpsi(0, u) * v).norm() < 1e-8);
}

TEST_CASE("warped fiber submersion balances curvature against dilation") {
  DomainPtr wd = warped_circle_sphere_domain(warp_reciprocal_sqrt,
                                             warp_reciprocal_sqrt_prime, 12, 8, 8, 16);
  AnalyticMap map = warped_fiber_submersion(wd);
  SubmersionMap sub(map);
  Vec u(4);
  u << 0.7, 1.1, 1.3, 2.1;
  CHECK(sub.dilation_sq(0, u) ==
        doctest::Approx(1.0 + 0.5 * std::sin(0.7)).epsilon(1e-10));
  MinimalFiberReport rep = check_minimal_fibers(sub, 1.4);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.alpha_tension_l2 < 1e-6);
  CHECK(rep.max_fiber_mean_curvature < 1e-8);
  CHECK(rep.max_horizontal_grad < 1e-8);
  CHECK(rep.max_balance_residual < 1e-6);
  CHECK(rep.fibers_minimal);
  CHECK(rep.horizontal_grad_zero);
  CHECK(rep.equivalence_consistent);
}

TEST_CASE("doubly warped projection has non-minimal fibers yet balances") {
  double a = 1.4;
  DomainPtr dwd = doubly_warped_torus_domain(a, 10);
  SubmersionMap sub(doubly_warped_submersion(dwd));
  MinimalFiberReport rep = check_minimal_fibers(sub, a);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.alpha_tension_l2 < 1e-6);
  // the two balance terms are individually far from zero and cancel
  CHECK(rep.max_fiber_mean_curvature > 1e-2);
  CHECK(rep.max_horizontal_grad > 1e-2);
  CHECK(rep.max_balance_residual < 1e-8);
  CHECK(!rep.fibers_minimal);
  CHECK(!rep.horizontal_grad_zero);
  CHECK(rep.equivalence_consistent);
}

TEST_CASE("non-submersions are rejected by the dilation") {
  DomainPtr s2 = sphere2_domain(1.0, 8, 16);
  AnalyticMap stretch = latitude_stretch_s2(s2, 0.4);
  SubmersionMap sub(stretch);
  Vec u(2);
  u << 0.9, 1.3;
  // latitude stretch is not horizontally conformal
  CHECK_THROWS(sub.dilation_sq(0, u));
}
