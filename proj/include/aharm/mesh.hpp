#pragma once

#include "aharm/types.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace aharm {

/* Triangle mesh representing the domain surface, with vertices embedded in
 * R^d (d = 3 for spheres and file meshes, d = 4 for the flat Clifford torus).
 * The per-face Riemannian data is the Gram metric of the edge basis
 * E1 = v1 - v0, E2 = v2 - v0. */
class DomainMesh {
public:
  int embed_dim = 3;
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> faces;

  /* Derived quantities, built by finalize(). */
  std::vector<double> face_area;
  std::vector<Mat2> face_metric;
  std::vector<Mat2> face_metric_inv;
  std::vector<double> vertex_mass; // one third of incident face areas
  double total_area = 0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }

  /* Edge vectors (v1 - v0, v2 - v0) of face f. */
  std::pair<Vec, Vec> edges(int f) const;

  /* Validates connectivity and geometry and fills the derived arrays.
   * Throws on out-of-range or repeated indices, non-finite coordinates,
   * and degenerate faces. */
  void finalize();

  static DomainMesh icosphere(int subdivisions);
  static DomainMesh torus_grid(int nu, int nv, double r1 = 1.0, double r2 = 1.0);
};

using MeshPtr = std::shared_ptr<const DomainMesh>;

/* Strict loaders; errors carry 1-based line numbers. */
DomainMesh load_off(const std::string& path);
DomainMesh load_obj(const std::string& path);
DomainMesh load_mesh_file(const std::string& path); // dispatch on extension

} // namespace aharm
