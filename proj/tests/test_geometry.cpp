#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aharm/catalog.hpp"
#include "aharm/chart.hpp"
#include "aharm/mesh.hpp"
#include "aharm/report.hpp"

#include <cmath>
#include <cstdio>

using namespace aharm;

TEST_CASE("icosphere area converges to the round sphere") {
  double prev_err = 1.0;
  for (int s = 2; s <= 4; ++s) {
    DomainMesh m = DomainMesh::icosphere(s);
    for (const Vec& v : m.vertices) CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    double err = std::abs(m.total_area / (4.0 * kPi) - 1.0);
    CHECK(err < prev_err * 0.3); // second-order refinement
    prev_err = err;
  }
  CHECK(prev_err < 1e-3);
}

TEST_CASE("icosphere face count scales by four per subdivision") {
  CHECK(DomainMesh::icosphere(0).num_faces() == 20);
  CHECK(DomainMesh::icosphere(3).num_faces() == 20 * 64);
  CHECK(DomainMesh::icosphere(5).num_faces() == 20 * 1024); // >= 10k faces
}

TEST_CASE("torus grid is flat with exact area") {
  DomainMesh m = DomainMesh::torus_grid(16, 24, 1.0, 0.5);
  CHECK(m.embed_dim == 4);
  CHECK(m.num_faces() == 2 * 16 * 24);
  CHECK(m.total_area == doctest::Approx(4.0 * kPi * kPi * 0.5).epsilon(1e-12));
  double mass = 0;
  for (double w : m.vertex_mass) mass += w;
  CHECK(mass == doctest::Approx(m.total_area).epsilon(1e-12));
}

TEST_CASE("analytic domain volumes match closed forms") {
  CHECK(catalog::sphere2_domain(1.0, 32, 64)->volume() ==
        doctest::Approx(4.0 * kPi).epsilon(1e-10));
  CHECK(catalog::sphere2_domain(2.0, 32, 64)->volume() ==
        doctest::Approx(16.0 * kPi).epsilon(1e-10));
  CHECK(catalog::sphere3_domain(1.0, 16, 16, 32)->volume() ==
        doctest::Approx(2.0 * kPi * kPi).epsilon(1e-10));
  CHECK(catalog::circle_domain(64)->volume() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(catalog::torus_domain(Vec::Constant(3, 2.0 * kPi), 8)->volume() ==
        doctest::Approx(std::pow(2.0 * kPi, 3)).epsilon(1e-12));
}

TEST_CASE("chart christoffels match the metric-derived ones") {
  DomainPtr dom = catalog::sphere3_domain(1.0, 8, 8, 16);
  const Chart& ch = dom->charts[0];
  Vec u(3);
  u << 1.1, 0.7, 2.3;
  auto gamma = ch.christoffel(u);
  auto ref = christoffel_from_metric(ch.metric, u, 5e-4);
  double worst = 0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, (gamma[k] - ref[k]).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-9);
}

TEST_CASE("embedded jacobians agree with finite differences") {
  Vec u(3);
  u << 0.9, 1.4, 5.1;
  Mat J = catalog::embed_s3_jac(u);
  double h = 1e-5;
  for (int a = 0; a < 3; ++a) {
    Vec up = u, um = u;
    up[a] += h;
    um[a] -= h;
    Vec fd = (catalog::embed_s3(up) - catalog::embed_s3(um)) / (2.0 * h);
    CHECK((fd - J.col(a)).norm() < 1e-9);
  }
}

TEST_CASE("mesh loader reports the offending line") {
  std::string path = "tmp_bad_mesh.off";
  write_text_file(path, "OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\nnot_a_number 0 1\n3 0 1 2\n3 0 2 3\n");
  bool threw = false;
  try {
    load_mesh_file(path);
  } catch (const std::exception& e) {
    threw = true;
    CHECK(std::string(e.what()).find(":6:") != std::string::npos);
  }
  CHECK(threw);
  std::remove(path.c_str());
}

TEST_CASE("mesh validation rejects degenerate faces") {
  DomainMesh m;
  m.embed_dim = 3;
  m.vertices = {Vec::Zero(3), Vec::Zero(3), Vec::Zero(3)};
  m.vertices[1][0] = 1.0;
  m.vertices[2][0] = 2.0; // collinear
  m.faces = {{0, 1, 2}};
  CHECK_THROWS(m.finalize());
}
