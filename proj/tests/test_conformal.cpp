#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aharm/catalog.hpp"
#include "aharm/conformal.hpp"
#include "aharm/variational.hpp"

#include <cmath>

using namespace aharm;
using namespace aharm::catalog;
using namespace aharm::smallenergy;

TEST_CASE("profile derivative and its inverse round-trip") {
  for (double a : {1.5, 2.0, 3.0}) {
    CHECK(h(0.0, a) == 1.0);
    CHECK(h_prime(0.0, a) == 2.0 * a);
    for (int i = 0; i < 1000; ++i) {
      double s = 2.0 * a + 50.0 * i / 999.0;
      CHECK(std::abs(h_prime(h_prime_inverse(s, a), a) - s) <= 1e-12 * s);
      double t = 10.0 * i / 999.0;
      CHECK(std::abs(h_prime_inverse(h_prime(t, a), a) - t) <= 1e-12 * (1.0 + t));
    }
  }
}

TEST_CASE("certified interval and implicit dilation") {
  struct Case {
    double a;
    int m;
  } cases[] = {{2.0, 5}, {1.5, 4}};
  for (const Case& cs : cases) {
    ValidityInterval iv = validity_interval(cs.a, cs.m);
    CHECK(iv.monotonic_margin > 0);
    CHECK(iv.eps_prime > 0);
    CHECK(iv.u_lo == doctest::Approx(std::pow(2.0 * cs.a, 1.0 / (cs.m - 2))).epsilon(1e-14));
    CHECK(theta(0.0, iv) == doctest::Approx(iv.u_lo).epsilon(1e-12));
    for (int i = 0; i <= 400; ++i) {
      double y = iv.eps_prime * i / 400.0;
      double th = theta(y, iv);
      double lhs = h_prime(y * th * th, cs.a);
      double rhs = std::pow(th, cs.m - 2);
      CHECK(std::abs(lhs - rhs) < 1e-10 * rhs);
    }
  }
}

TEST_CASE("density factor solves the rescaled-density identity") {
  DomainPtr t5 = torus_domain(Vec::Constant(5, 2.0 * kPi), 6);
  AnalyticMap lin =
      torus_linear(t5, 0.3 * Mat::Identity(5, 5), Vec::Constant(5, 0.6 * kPi));
  DensityFactor f = density_factor(lin, 2.0);
  CHECK(f.max_half_density < f.interval.eps_prime);
  CHECK(density_identity_residual(lin, f, 2.0) < 1e-8);
}

TEST_CASE("construction makes a harmonic map alpha-harmonic") {
  DomainPtr t5 = torus_domain(Vec::Constant(5, 2.0 * kPi), 6);
  AnalyticMap lin =
      torus_linear(t5, 0.3 * Mat::Identity(5, 5), Vec::Constant(5, 0.6 * kPi));
  BuildReport br = make_alpha_harmonic_metric(lin, 2.0);
  CHECK(br.input_tension_l2 < 1e-8);
  CHECK(br.identity_residual < 1e-8);
  CHECK(br.alpha_tension_l2 < 1e-8);

  DomainPtr wd = warped_circle_sphere_domain(warp_slow, warp_slow_prime, 16, 8, 8, 16);
  AnalyticMap sub = warped_fiber_submersion(wd);
  BuildReport bw = make_alpha_harmonic_metric(sub, 1.5);
  CHECK(bw.input_tension_l2 < 1e-8);
  CHECK(bw.max_half_density < bw.interval.eps_prime);
  CHECK(bw.identity_residual < 1e-8);
  CHECK(bw.alpha_tension_l2 < 1e-8);
}

TEST_CASE("conformal factor turns alpha-tension into rescaled tension") {
  DomainPtr s3 = sphere3_domain(1.0, 8, 8, 16);
  AnalyticMap cs = chi_stretch_s3(s3, 0.2);
  AnalyticMap tw = twist_s3(s3, 0.3);
  for (double a : {1.5, 2.0}) {
    // both maps are non-harmonic, m = 3
    CHECK(alpha_tension_l2_norm(MapState(cs), a) > 1e-2);
    ConformalEquivalenceReport r1 = check_conformal_equivalence(cs, a);
    CHECK(r1.max_identity_residual < 1e-8);
    CHECK(r1.max_law_residual < 1e-8);
    CHECK(r1.min_singular_value > 0.1);
    ConformalEquivalenceReport r2 = check_conformal_equivalence(tw, a);
    CHECK(r2.max_identity_residual < 1e-8);
    CHECK(r2.max_law_residual < 1e-8);
  }
}

TEST_CASE("degenerate differentials are rejected") {
  DomainPtr s3 = sphere3_domain(1.0, 6, 6, 12);
  AnalyticMap tiny = small_image_s3(s3, 1e-3);
  CHECK_THROWS(alpha_conformal_factor(tiny, 2.0, 1e-2));
  CHECK_NOTHROW(alpha_conformal_factor(tiny, 2.0));
}
