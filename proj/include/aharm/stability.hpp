#pragma once

#include "aharm/variational.hpp"

namespace aharm {

/* Second-variation (index) form of the alpha-energy at a map psi:
 * I(v,w) = INT { 4a(a-1)(1+t)^(a-2) <dv,dpsi><dw,dpsi>
 *              - 2a(1+t)^(a-1) h(TrR(v,dpsi)dpsi, w)
 *              + 2a(1+t)^(a-1) <dv,dw> } dV,   t = |dpsi|^2,
 * with covariant derivatives of the sections in the pullback bundle. */
double index_form(const AnalyticMap& map, double alpha, const VariationField& v,
                  const VariationField& w);
double index_form(const DiscreteMap& map, double alpha, const MeshField& v,
                  const MeshField& w);
double index_form(const MapState& map, double alpha, const VariationField& v,
                  const VariationField& w);

/* Jacobi operator: I(v,w) = -INT h(J v, w) for alpha-harmonic psi. */
std::function<Vec(int, const Vec&)> jacobi_apply(const AnalyticMap& map, double alpha,
                                                 const VariationField& v);
double jacobi_duality_residual(const AnalyticMap& map, double alpha, const VariationField& v,
                               const VariationField& w);

/* Dense index matrix over per-vertex tangent bases (h-orthonormal), with the
 * lumped mass vector of the discrete L2 inner product. */
struct IndexMatrix {
  Mat A;
  Vec mass;                            // diagonal of M
  std::vector<std::vector<Vec>> bases; // per vertex
  int n_per_vertex = 0;
  double symmetry_defect = 0;          // max |A - A^T| relative to |A|
};
IndexMatrix assemble_index_matrix(const DiscreteMap& map, double alpha);

MeshField field_from_coeffs(const DiscreteMap& map, const IndexMatrix& ix, const Vec& x);
Vec coeffs_from_field(const DiscreteMap& map, const IndexMatrix& ix, const MeshField& v);

/* Smallest eigenvalue of A z = lambda M z and its eigenfield. */
struct StabilityReport {
  double lambda_min = 0;
  int dofs = 0;
  MeshField mode;
};
StabilityReport stability_eigenvalue(const DiscreteMap& map, double alpha);
StabilityReport stability_eigenvalue(const DiscreteMap& map, double alpha,
                                     const IndexMatrix& ix);

/* Richardson-extrapolated second difference of s -> E_alpha(retract(psi + s v)). */
double fd_second_variation(const MapState& map, double alpha, const VariationField& v,
                           double step = 0.02);

/* Parallel orthonormal frame of R^(n+1) and its tangential parts along maps
 * into S^n. */
std::vector<Vec> sphere_frame(int coord_dim);
Vec tangential_part(const Vec& L, const Vec& p);

/* Pointwise identities satisfied by the tangential parts of a parallel frame
 * along a map into a sphere (covariant derivative via the shape operator,
 * its pairings, and the curvature pairing). Residuals are maxima over
 * quadrature samples, frame vectors, and coordinate directions. */
struct FrameIdentityReport {
  double max_cov_residual = 0;      // nabla_X L^T vs shape-operator route
  double max_pairing_residual = 0;  // <nabla_X L^T, dpsi X> vs -|dpsi X|^2 <p,L>
  double max_norm_residual = 0;     // |nabla_X L^T|^2 vs |dpsi X|^2 <p,L>^2
  double max_curvature_residual = 0;
};
FrameIdentityReport check_parallel_field_identities(const AnalyticMap& map);

/* rho(t) = 2 a t (1+t)^(a-2) ((2-n) + (2a-n) t): the pointwise value of the
 * frame-summed index form for sphere targets S^n. */
double frame_integrand(double t, double alpha, int n);

/* Two independent evaluations of sum_k I(L_k^T, L_k^T) for a map into S^n:
 * assembling the index form field-by-field versus integrating rho(|dpsi|^2).
 * Requires the map to be alpha-harmonic to `harmonic_tol`. */
struct FrameIndexSum {
  double index_path = 0;
  double integral_path = 0;
  double rel_mismatch = 0;
  double tension_norm = 0;
  double rayleigh_witness = 0; // min_k I(L_k^T)/|L_k^T|_L2^2 over nonzero fields
};
FrameIndexSum frame_index_sum(const MapState& map, double alpha, double harmonic_tol);

/* Instability certificate for alpha-harmonic maps into S^n: when 2 alpha > n,
 * a nonconstant map with |dpsi|^2 < (n-2)/(2 alpha - n) everywhere has
 * negative frame index sum, hence is unstable. */
struct InstabilityCertificate {
  bool bound_meaningful = false; // 2 alpha > n
  double bound = 0;
  double max_density = 0;
  double min_density = 0;
  bool hypothesis = false;
  FrameIndexSum sum;
  bool unstable = false;
  bool consistent = false; // hypothesis implies unstable
};
InstabilityCertificate instability_certificate(const MapState& map, double alpha,
                                               double harmonic_tol);

/* Nonzero entries of a dense matrix in coordinate form: a "row,col,value" CSV
 * with 0-based indices, rows in row-major order. */
std::string coordinate_text(const Mat& A);

} // namespace aharm
