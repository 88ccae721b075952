#pragma once

#include "aharm/target.hpp"

#include <vector>

namespace aharm {

/* Deterministic h-orthonormal tangent basis at a point of the target.
 * Spheres: Gram-Schmidt of coordinate axes against p, skipping the axis most
 * aligned with p (stable near poles). Flat targets: coordinate axes; the
 * hyperbolic basis is scaled by 1/lambda so it is orthonormal in h. */
std::vector<Vec> tangent_basis(const TargetManifold& target, const Vec& p);

} // namespace aharm
