#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aharm/catalog.hpp"
#include "aharm/mesh.hpp"
#include "aharm/stability.hpp"

#include <cmath>

using namespace aharm;
using namespace aharm::catalog;

TEST_CASE("index form is symmetric") {
  AnalyticMap stretch = latitude_stretch_s2(sphere2_domain(1.0, 16, 32), 0.2);
  AnalyticField v = modulated_frame_variation(stretch, Vec::Unit(3, 0), Vec::Zero(2));
  AnalyticField w = modulated_frame_variation(stretch, Vec::Unit(3, 2), Vec::Ones(2));
  double Ivw = index_form(stretch, 2.0, VariationField(v), VariationField(w));
  double Iwv = index_form(stretch, 2.0, VariationField(w), VariationField(v));
  CHECK(std::abs(Ivw - Iwv) <= 1e-12 * (1.0 + std::abs(Ivw)));
}

TEST_CASE("index matrix is symmetric and stable for flat windings") {
  auto grid = std::make_shared<DomainMesh>(DomainMesh::torus_grid(16, 16));
  DiscreteMap lin = mesh_torus_map(grid, TargetManifold::flat_torus(2, 2.0 * kPi),
                                   [](const Vec& u) { return u; });
  for (double a : {1.5, 2.0}) {
    IndexMatrix ix = assemble_index_matrix(lin, a);
    CHECK(ix.symmetry_defect <= 1e-12);
    StabilityReport st = stability_eigenvalue(lin, a, ix);
    CHECK(st.dofs == 2 * grid->num_vertices());
    CHECK(st.lambda_min >= -1e-8);
  }
}

TEST_CASE("jacobi operator is dual to the index form at critical points") {
  AnalyticMap id2 = identity_s2(sphere2_domain(1.0, 16, 32));
  AnalyticField v = modulated_frame_variation(id2, Vec::Unit(3, 1), Vec::Zero(2));
  AnalyticField w = modulated_frame_variation(id2, Vec::Unit(3, 0), Vec::Ones(2), 0.3);
  for (double a : {1.5, 2.0}) {
    CHECK(jacobi_duality_residual(id2, a, VariationField(v), VariationField(w)) < 1e-6);
  }
  AnalyticMap id3 = identity_s3(sphere3_domain(1.0, 8, 8, 16));
  AnalyticField v3 = modulated_frame_variation(id3, Vec::Unit(4, 2), Vec::Zero(3));
  AnalyticField w3 = modulated_frame_variation(id3, Vec::Unit(4, 0), Vec::Zero(3));
  CHECK(jacobi_duality_residual(id3, 2.0, VariationField(v3), VariationField(w3)) < 1e-6);
}

TEST_CASE("finite differences reproduce the second variation at critical points") {
  AnalyticMap id2 = identity_s2(sphere2_domain(1.0, 16, 32));
  for (int k : {0, 1, 2}) {
    VariationField v(frame_variation(id2, Vec::Unit(3, k)));
    double I = index_form(id2, 2.0, v, v);
    double fd = fd_second_variation(MapState(id2), 2.0, v);
    CHECK(std::abs(I - fd) <= 1e-3 * (1.0 + std::abs(I)));
  }
  auto mesh = std::make_shared<DomainMesh>(DomainMesh::icosphere(2));
  DiscreteMap sph = mesh_sphere_identity(mesh);
  MeshField mv = mesh_frame_variation(sph, Vec::Unit(3, 1));
  double I = index_form(sph, 2.0, mv, mv);
  double fd = fd_second_variation(MapState(sph), 2.0, VariationField(mv));
  CHECK(std::abs(I - fd) <= 1e-3 * (1.0 + std::abs(I)));
}

TEST_CASE("parallel frame fields satisfy the pointwise identities") {
  DomainPtr s2 = sphere2_domain(1.0, 12, 24);
  DomainPtr s3 = sphere3_domain(1.0, 8, 8, 16);
  for (const AnalyticMap& map :
       {identity_s2(s2), latitude_stretch_s2(s2, 0.3), identity_s3(s3),
        twist_s3(s3, 0.3), equator_circle(circle_domain(128))}) {
    FrameIdentityReport rep = check_parallel_field_identities(map);
    CHECK(rep.max_cov_residual < 1e-10);
    CHECK(rep.max_pairing_residual < 1e-10);
    CHECK(rep.max_norm_residual < 1e-10);
    CHECK(rep.max_curvature_residual < 1e-10);
  }
}

TEST_CASE("frame-summed index form agrees along both routes") {
  AnalyticMap eq = equator_circle(circle_domain(256));
  FrameIndexSum fs = frame_index_sum(MapState(eq), 2.0, 1e-6);
  CHECK(fs.rel_mismatch < 1e-8);
  // t = 1, n = 2: rho(1) = 2 a (1+1)^(a-2) ((2-n) + (2a-n)) = 8 over a length of 2 pi
  CHECK(fs.integral_path == doctest::Approx(16.0 * kPi).epsilon(1e-10));

  AnalyticMap id3 = identity_s3(sphere3_domain(1.0, 12, 12, 24));
  FrameIndexSum fs3 = frame_index_sum(MapState(id3), 2.0, 1e-6);
  CHECK(fs3.rel_mismatch < 1e-8);
  // t = 3, n = 3: rho(3) = 12 ((-1) + 3) = 24 over a volume of 2 pi^2
  CHECK(fs3.integral_path == doctest::Approx(48.0 * kPi * kPi).epsilon(1e-10));
}

TEST_CASE("frame sum rejects maps that are not critical points") {
  AnalyticMap stretch = latitude_stretch_s2(sphere2_domain(1.0, 12, 24), 0.3);
  CHECK_THROWS(frame_index_sum(MapState(stretch), 2.0, 1e-6));
}

TEST_CASE("pointwise frame integrand changes sign at the density bound") {
  // 2 alpha > n: bound (n-2)/(2 alpha - n); at the bound the integrand vanishes
  for (auto [a, n] : {std::pair<double, int>{2.0, 3}, {3.0, 4}}) {
    double bound = (n - 2.0) / (2.0 * a - n);
    CHECK(std::abs(frame_integrand(bound, a, n)) <=
          1e-14 * std::abs(frame_integrand(2.0 * bound, a, n)));
    for (int i = 1; i < 50; ++i) {
      double t = bound * i / 50.0;
      CHECK(frame_integrand(t, a, n) < 0);
    }
    CHECK(frame_integrand(bound * 1.01, a, n) > 0);
  }
  CHECK(frame_integrand(0.0, 2.0, 3) == 0.0);
}

TEST_CASE("instability certificate classifies the sphere identities") {
  AnalyticMap id3 = identity_s3(sphere3_domain(1.0, 10, 10, 20));
  InstabilityCertificate cert = instability_certificate(MapState(id3), 2.0, 1e-6);
  CHECK(cert.bound_meaningful); // 2 alpha = 4 > n = 3
  CHECK(cert.bound == doctest::Approx(1.0));
  CHECK(cert.max_density == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(!cert.hypothesis); // density sits above the bound
  CHECK(!cert.unstable);   // frame sum is positive
  CHECK(cert.consistent);

  InstabilityCertificate flat = instability_certificate(MapState(id3), 1.5, 1e-6);
  CHECK(!flat.bound_meaningful); // 2 alpha = n = 3
  CHECK(flat.consistent);
}
