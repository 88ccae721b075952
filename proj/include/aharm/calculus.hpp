#pragma once

#include "aharm/map.hpp"

namespace aharm {

/* Differential of a map at a mesh face (optionally tangent-projected at the
 * face's image barycenter) or at a chart point. */
Mat differential(const DiscreteMap& map, int face, bool project = true);
Mat differential(const AnalyticMap& map, int chart, const Vec& u);

/* Hilbert-Schmidt energy density |dpsi|^2 = trace(g^-1 dpsi^T h dpsi). */
double hs_norm_sq(const DiscreteMap& map, int face);
double hs_norm_sq(const AnalyticMap& map, int chart, const Vec& u);

/* Gradient of a piecewise-linear vertex scalar: one ambient vector per face. */
std::vector<Vec> grad_scalar(const DomainMesh& mesh, const Vec& vertex_values);

/* Chart coefficients of grad f = g^-1 df at a point (df by stencil). */
Vec grad_scalar(const AnalyticDomain& domain,
                const std::function<double(int, const Vec&)>& f, int chart, const Vec& u);

/* Integral of a scalar field over the domain. */
double integrate(const DomainMesh& mesh, const ScalarField& f);
double integrate(const AnalyticDomain& domain, const ScalarField& f);

/* Discrete/continuous L2 norm of a variation field along a map (lumped vertex
 * masses on meshes, quadrature on analytic domains), in the target metric. */
double field_l2_norm(const DiscreteMap& map, const MeshField& v);
double field_l2_norm(const AnalyticMap& map, const VariationField& v);

/* Covariant derivatives of a section along an analytic map: column i holds
 * (nabla_i v)(u) in target coordinates. */
Mat field_cov_derivs(const AnalyticMap& map, const VariationField& v, int chart, const Vec& u);

} // namespace aharm
