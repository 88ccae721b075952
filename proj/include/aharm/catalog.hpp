#pragma once

#include "aharm/map.hpp"

namespace aharm {
namespace catalog {

/* Unit-sphere embeddings of the standard angular charts and their exact
 * differentials with respect to the chart coordinates. */
Vec embed_s2(const Vec& u);     // (theta, phi) -> R^3
Mat embed_s2_jac(const Vec& u); // 3 x 2
Vec embed_s3(const Vec& u);     // (chi, theta, phi) -> R^4
Mat embed_s3_jac(const Vec& u); // 4 x 3

/* Round spheres in angular charts with closed-form metric, Christoffel
 * symbols, and volume factor. */
DomainPtr sphere2_domain(double radius = 1.0, int n_theta = 48, int n_phi = 96);
DomainPtr sphere3_domain(double radius = 1.0, int n_chi = 24, int n_theta = 24,
                         int n_phi = 48);

/* Unit circle (arc-length chart) and flat tori of arbitrary dimension. */
DomainPtr circle_domain(int n = 256);
DomainPtr torus_domain(const Vec& periods, int nodes_per_axis = 16);

/* S^1 x S^3 with metric dt^2 + a(t)^2 g_round; `warp` and its derivative are
 * evaluated at the circle coordinate. */
DomainPtr warped_circle_sphere_domain(std::function<double(double)> warp,
                                      std::function<double(double)> warp_prime,
                                      int n_t = 24, int n_chi = 16, int n_theta = 16,
                                      int n_phi = 32);

/* T^3 x S^1 with metric (3/s) dx^2 + gamma^2 dy^2, s = 1 + 0.3 sin x_1 and
 * gamma = s^(1/2) (1+s)^(1-alpha); the coordinate projection onto T^3 is then
 * alpha-harmonic with non-minimal fibers. */
DomainPtr doubly_warped_torus_domain(double alpha, int nodes_per_axis = 16);

/* Warp profiles used by the examples: (1 + sin(t)/2)^(-1/2) makes the fiber
 * dilation mu^2 = 1 + sin(t)/2; 2 + 0.3 sin t keeps the pullback density
 * below 1.1 everywhere. */
double warp_reciprocal_sqrt(double t);
double warp_reciprocal_sqrt_prime(double t);
double warp_slow(double t);
double warp_slow_prime(double t);

/* Maps into round spheres. */
AnalyticMap identity_s2(DomainPtr dom);
AnalyticMap identity_s3(DomainPtr dom);
AnalyticMap latitude_stretch_s2(DomainPtr dom, double a); // theta -> theta + a sin theta
AnalyticMap chi_stretch_s3(DomainPtr dom, double a);      // chi -> chi + a sin chi
AnalyticMap twist_s3(DomainPtr dom, double a);            // phi -> phi + a cos chi
AnalyticMap hopf_map(DomainPtr dom);                      // S^3 -> S^2
AnalyticMap small_image_s3(DomainPtr dom, double eps);    // normalize(e4 + eps embed)
AnalyticMap equator_circle(DomainPtr dom);                // S^1 -> S^2 great circle

/* Maps into flat tori and the hyperbolic disk. */
AnalyticMap torus3_nonlinear(DomainPtr dom, double a); // u_i + a sin u_(i+1)
AnalyticMap torus_linear(DomainPtr dom, const Mat& W, const Vec& target_periods);
AnalyticMap torus_to_disk(DomainPtr dom, double r); // (r cos u1, r sin u2)

/* Projections of the warped products onto their sphere / torus factors. */
AnalyticMap warped_fiber_submersion(DomainPtr dom);  // S^1 x_a S^3 -> S^3
AnalyticMap doubly_warped_submersion(DomainPtr dom); // T^3 x S^1 -> T^3

/* Mesh maps. */
DiscreteMap mesh_sphere_identity(MeshPtr mesh);
/* Angles (u, v) of each torus_grid vertex, recovered from the embedding. */
std::vector<Vec> torus_grid_angles(const DomainMesh& mesh);
/* PL map from per-vertex angle evaluator (torus_grid domains). */
DiscreteMap mesh_torus_map(MeshPtr mesh, TargetManifold target,
                           const std::function<Vec(const Vec&)>& fn);
/* PL map from per-vertex position evaluator (any embedded mesh). */
DiscreteMap mesh_vertex_map(MeshPtr mesh, TargetManifold target,
                            const std::function<Vec(const Vec&)>& fn);

/* Variation fields with closed-form jacobians. */
AnalyticField frame_variation(const AnalyticMap& map, const Vec& L); // sphere targets
MeshField mesh_frame_variation(const DiscreteMap& map, const Vec& L);
/* cos(freq . u + shift) times the tangential part of L (sphere targets). */
AnalyticField modulated_frame_variation(const AnalyticMap& map, const Vec& L,
                                        const Vec& freq, double shift = 0.0);
/* cos(freq . u + shift) times a constant coordinate vector (flat targets). */
AnalyticField modulated_constant_variation(const Vec& c, const Vec& freq,
                                           double shift = 0.0);

} // namespace catalog
} // namespace aharm
