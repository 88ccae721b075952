#include "aharm/tangent_basis.hpp"

#include <cmath>

namespace aharm {

std::vector<Vec> tangent_basis(const TargetManifold& target, const Vec& p) {
  switch (target.kind()) {
    case TargetManifold::Kind::Sphere: {
      int d = target.coord_dim();
      int skip = 0;
      for (int j = 1; j < d; ++j)
        if (std::abs(p[j]) > std::abs(p[skip])) skip = j;
      std::vector<Vec> basis;
      basis.reserve(target.dim());
      for (int j = 0; j < d && static_cast<int>(basis.size()) < target.dim(); ++j) {
        if (j == skip) continue;
        Vec v = Vec::Zero(d);
        v[j] = 1.0;
        v -= p.dot(v) * p;
        for (const Vec& b : basis) v -= b.dot(v) * b;
        double n = v.norm();
        if (n < 1e-10) fail("tangent basis degenerated at a sphere point");
        basis.push_back(v / n);
      }
      return basis;
    }
    case TargetManifold::Kind::FlatTorus: {
      std::vector<Vec> basis;
      for (int j = 0; j < target.dim(); ++j) {
        Vec v = Vec::Zero(target.dim());
        v[j] = 1.0;
        basis.push_back(v);
      }
      return basis;
    }
    case TargetManifold::Kind::Hyperbolic: {
      double lam = std::sqrt(target.conformal_scale_sq(p));
      std::vector<Vec> basis;
      for (int j = 0; j < 2; ++j) {
        Vec v = Vec::Zero(2);
        v[j] = 1.0 / lam;
        basis.push_back(v);
      }
      return basis;
    }
    case TargetManifold::Kind::Custom:
      fail("tangent basis for custom targets is not provided");
  }
  fail("unreachable");
}

} // namespace aharm
