#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aharm/catalog.hpp"
#include "aharm/mesh.hpp"
#include "aharm/variational.hpp"

#include <cmath>

using namespace aharm;
using namespace aharm::catalog;

TEST_CASE("sphere identity energies match closed forms") {
  AnalyticMap id2 = identity_s2(sphere2_domain());
  // |dpsi|^2 = 2, so E_a = 3^a * 4 pi
  CHECK(alpha_energy(id2, 2.0) == doctest::Approx(36.0 * kPi).epsilon(1e-10));
  CHECK(alpha_energy(id2, 1.5) ==
        doctest::Approx(std::pow(3.0, 1.5) * 4.0 * kPi).epsilon(1e-10));

  AnalyticMap id3 = identity_s3(sphere3_domain());
  CHECK(alpha_energy(id3, 1.5) == doctest::Approx(16.0 * kPi * kPi).epsilon(1e-10));
}

TEST_CASE("flat winding map energy is exact") {
  DomainPtr t3 = torus_domain(Vec::Constant(3, 2.0 * kPi), 8);
  AnalyticMap lin = torus_linear(t3, Mat::Identity(3, 3), Vec::Constant(3, 2.0 * kPi));
  // |dpsi|^2 = 3 everywhere
  CHECK(alpha_energy(lin, 2.0) ==
        doctest::Approx(16.0 * std::pow(2.0 * kPi, 3)).epsilon(1e-12));
}

TEST_CASE("alpha below one is rejected") {
  AnalyticMap id2 = identity_s2(sphere2_domain(1.0, 16, 32));
  CHECK_THROWS(alpha_energy(id2, 0.99));
}

TEST_CASE("mesh energy converges to the smooth value under refinement") {
  double prev = 1.0;
  for (int s = 2; s <= 4; ++s) {
    auto mesh = std::make_shared<DomainMesh>(DomainMesh::icosphere(s));
    double e = alpha_energy(mesh_sphere_identity(mesh), 2.0);
    double err = std::abs(e - 36.0 * kPi) / (36.0 * kPi);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 5e-3);
}

TEST_CASE("alpha-tension reduces to twice the tension at alpha one") {
  AnalyticMap stretch = latitude_stretch_s2(sphere2_domain(1.0, 16, 32), 0.2);
  Vec u(2);
  u << 1.1, 2.3;
  Vec ta = alpha_tension_at(stretch, 1.0, 0, u);
  Vec t = tension_at(stretch, 0, u);
  CHECK((ta - 2.0 * t).norm() < 1e-9 * (1.0 + t.norm()));
}

TEST_CASE("sphere identities are alpha-harmonic") {
  AnalyticMap id2 = identity_s2(sphere2_domain(1.0, 16, 32));
  CHECK(alpha_tension_l2_norm(MapState(id2), 2.0) < 1e-8);
  AnalyticMap id3 = identity_s3(sphere3_domain(1.0, 8, 8, 16));
  CHECK(alpha_tension_l2_norm(MapState(id3), 1.5) < 1e-8);
  AnalyticMap eq = equator_circle(circle_domain(128));
  CHECK(alpha_tension_l2_norm(MapState(eq), 2.0) < 1e-10);
}

TEST_CASE("fd gradient matches the analytic energy gradient") {
  auto mesh = std::make_shared<DomainMesh>(DomainMesh::icosphere(2));
  DiscreteMap pm = perturb_map(mesh_sphere_identity(mesh), 0.05, 11);
  for (double a : {1.5, 2.0, 3.0}) {
    GradCheckReport rep = gradient_consistency(pm, a);
    CHECK(rep.rel_l2_error < 1e-8);
  }
}

TEST_CASE("fd gradient matches on flat and hyperbolic targets") {
  auto grid = std::make_shared<DomainMesh>(DomainMesh::torus_grid(12, 12));
  DiscreteMap tor = mesh_torus_map(grid, TargetManifold::flat_torus(2, 2.0 * kPi),
                                   [](const Vec& u) { return u; });
  CHECK(gradient_consistency(perturb_map(tor, 0.05, 13), 2.0).rel_l2_error < 1e-8);

  DiscreteMap dsk = mesh_torus_map(grid, TargetManifold::hyperbolic_plane(), [](const Vec& u) {
    Vec p(2);
    p << 0.3 * std::cos(u[0]), 0.3 * std::sin(u[1]);
    return p;
  });
  CHECK(gradient_consistency(perturb_map(dsk, 0.03, 17), 1.5).rel_l2_error < 1e-8);
}

TEST_CASE("gradient flow reaches a critical point monotonically") {
  auto mesh = std::make_shared<DomainMesh>(DomainMesh::icosphere(2));
  DiscreteMap pm = perturb_map(mesh_sphere_identity(mesh), 0.05, 7);
  FlowOptions opts;
  opts.max_iters = 2000;
  opts.tension_tol = 1e-5;
  FlowReport rep = minimize_alpha_energy(pm, 2.0, opts);
  CHECK(rep.reason == FlowTermination::TensionBelowTol);
  CHECK(rep.final_tension_norm < 1e-5);
  CHECK(rep.final_energy <= rep.initial_energy);
  for (size_t i = 1; i < rep.energy_trajectory.size(); ++i)
    CHECK(rep.energy_trajectory[i] <= rep.energy_trajectory[i - 1]);
  CHECK(std::abs(rep.final_energy - 36.0 * kPi) / (36.0 * kPi) < 0.02);
  CHECK(alpha_tension_l2_norm(MapState(pm), 2.0) == doctest::Approx(rep.final_tension_norm));
}
