#include "aharm/mesh.hpp"

#include <cmath>
#include <map>

namespace aharm {

std::pair<Vec, Vec> DomainMesh::edges(int f) const {
  const auto& fc = faces[f];
  return {vertices[fc[1]] - vertices[fc[0]], vertices[fc[2]] - vertices[fc[0]]};
}

void DomainMesh::finalize() {
  int V = num_vertices(), F = num_faces();
  if (V < 3 || F < 1) fail("mesh needs at least 3 vertices and 1 face (got %d, %d)", V, F);
  double scale = 0;
  for (int i = 0; i < V; ++i) {
    if (static_cast<int>(vertices[i].size()) != embed_dim)
      fail("vertex %d has %d coordinates, expected %d", i, (int)vertices[i].size(), embed_dim);
    if (!vertices[i].allFinite()) fail("vertex %d has non-finite coordinates", i);
    scale = std::max(scale, vertices[i].norm());
  }
  face_area.assign(F, 0);
  face_metric.assign(F, Mat2::Zero());
  face_metric_inv.assign(F, Mat2::Zero());
  vertex_mass.assign(V, 0);
  total_area = 0;
  for (int f = 0; f < F; ++f) {
    const auto& fc = faces[f];
    for (int k = 0; k < 3; ++k)
      if (fc[k] < 0 || fc[k] >= V) fail("face %d references vertex %d out of range", f, fc[k]);
    if (fc[0] == fc[1] || fc[1] == fc[2] || fc[0] == fc[2])
      fail("face %d repeats a vertex index", f);
    auto [e1, e2] = edges(f);
    Mat2 g;
    g << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
    double det = g.determinant();
    double edge2 = std::max(g(0, 0), g(1, 1));
    if (!(det > 1e-14 * edge2 * edge2) || !(edge2 > 0))
      fail("face %d is degenerate (Gram determinant %.3g)", f, det);
    face_metric[f] = g;
    face_metric_inv[f] = g.inverse();
    double area = 0.5 * std::sqrt(det);
    face_area[f] = area;
    total_area += area;
    for (int k = 0; k < 3; ++k) vertex_mass[fc[k]] += area / 3.0;
  }
  for (int i = 0; i < V; ++i)
    if (!(vertex_mass[i] > 0)) fail("vertex %d belongs to no face", i);
}

DomainMesh DomainMesh::icosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 8) fail("icosphere subdivisions must be in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pts) p.normalize();
  std::vector<std::array<int, 3>> fcs = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = (pts[a] + pts[b]).normalized();
      pts.push_back(m);
      int idx = static_cast<int>(pts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(fcs.size() * 4);
    for (const auto& f : fcs) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    fcs = std::move(next);
  }
  DomainMesh mesh;
  mesh.embed_dim = 3;
  mesh.vertices.reserve(pts.size());
  for (const auto& p : pts) mesh.vertices.push_back(Vec(p));
  mesh.faces = std::move(fcs);
  mesh.finalize();
  return mesh;
}

DomainMesh DomainMesh::torus_grid(int nu, int nv, double r1, double r2) {
  if (nu < 3 || nv < 3) fail("torus grid needs at least 3 cells per direction");
  DomainMesh mesh;
  mesh.embed_dim = 4;
  mesh.vertices.reserve(static_cast<size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      double u = 2.0 * kPi * i / nu, v = 2.0 * kPi * j / nv;
      Vec p(4);
      p << r1 * std::cos(u), r1 * std::sin(u), r2 * std::cos(v), r2 * std::sin(v);
      mesh.vertices.push_back(p);
    }
  auto vid = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  mesh.finalize();
  return mesh;
}

} // namespace aharm
