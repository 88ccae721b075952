#pragma once

#include "aharm/chart.hpp"
#include "aharm/mesh.hpp"
#include "aharm/target.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace aharm {

/* Piecewise-linear map: one target coordinate vector per mesh vertex. */
class DiscreteMap {
public:
  MeshPtr mesh;
  TargetManifold target;
  std::vector<Vec> values;

  DiscreteMap(MeshPtr m, TargetManifold t, std::vector<Vec> vals);

  /* Wrap-consistent image of the face barycenter. */
  Vec barycenter_value(int f) const;

  /* Raw PL differential on face f in the edge basis (coord_dim x 2 matrix of
   * wrapped value differences). */
  Mat face_differential(int f) const;

  /* |dpsi|^2 on face f: trace(g_f^-1 D^T H D), H = target metric at the face
   * barycenter image. */
  double energy_density(int f) const;

  /* Max distance of any vertex value from the target manifold. */
  double on_manifold_residual() const;
  void validate(double tol = 1e-9) const;
};

/* Smooth map given by closed-form evaluators on the charts of an analytic
 * domain. dpsi must be the exact differential (checked against finite
 * differences by validate()); second derivatives are taken by five-point
 * stencils of dpsi. */
class AnalyticMap {
public:
  DomainPtr domain;
  TargetManifold target;
  std::function<Vec(int, const Vec&)> psi;
  std::function<Mat(int, const Vec&)> dpsi; // coord_dim x m

  AnalyticMap(DomainPtr d, TargetManifold t,
              std::function<Vec(int, const Vec&)> value,
              std::function<Mat(int, const Vec&)> differential);

  /* d_i(dpsi) for every chart axis i, each coord_dim x m. */
  std::vector<Mat> second_differential(int c, const Vec& u) const;

  double energy_density(int c, const Vec& u) const;

  /* Checks dpsi against central differences of psi at `samples` quadrature
   * nodes per chart plus the on-manifold constraint. */
  void validate(double fd_tol = 1e-5, int samples = 12, std::uint64_t seed = 7) const;

  /* Same map over another domain carrying the same charts (used to evaluate
   * tension fields under conformally rescaled metrics). */
  AnalyticMap with_domain(DomainPtr d) const;
};

/* A map in either representation, as consumed by the energy/tension/flow
 * entry points. */
class MapState {
public:
  MapState(DiscreteMap m) : rep_(std::move(m)) {}
  MapState(AnalyticMap m) : rep_(std::move(m)) {}

  bool is_mesh() const { return std::holds_alternative<DiscreteMap>(rep_); }
  const DiscreteMap& mesh() const { return std::get<DiscreteMap>(rep_); }
  DiscreteMap& mesh() { return std::get<DiscreteMap>(rep_); }
  const AnalyticMap& analytic() const { return std::get<AnalyticMap>(rep_); }
  const TargetManifold& target() const {
    return is_mesh() ? mesh().target : analytic().target;
  }

private:
  std::variant<DiscreteMap, AnalyticMap> rep_;
};

/* Section of the pullback tangent bundle along a map. */
struct MeshField {
  std::vector<Vec> values; // per vertex
};
struct AnalyticField {
  std::function<Vec(int, const Vec&)> value;
  std::function<Mat(int, const Vec&)> jacobian; // optional coordinate derivative
};

class VariationField {
public:
  VariationField(MeshField f) : rep_(std::move(f)) {}
  VariationField(AnalyticField f) : rep_(std::move(f)) {}

  bool is_mesh() const { return std::holds_alternative<MeshField>(rep_); }
  const MeshField& mesh() const { return std::get<MeshField>(rep_); }
  MeshField& mesh() { return std::get<MeshField>(rep_); }
  const AnalyticField& analytic() const { return std::get<AnalyticField>(rep_); }

  /* Coordinate Jacobian of an analytic field (closed form if supplied,
   * stencil otherwise). */
  Mat jacobian(int c, const Vec& u, double h) const;

private:
  std::variant<MeshField, AnalyticField> rep_;
};

/* Scalar field on the domain: per-face or per-vertex samples on meshes, an
 * evaluator on analytic domains. */
class ScalarField {
public:
  enum class Rep { FaceValues, VertexValues, Analytic };

  static ScalarField on_faces(Vec values);
  static ScalarField on_vertices(Vec values);
  static ScalarField analytic(std::function<double(int, const Vec&)> f);

  Rep rep() const { return rep_; }
  const Vec& values() const { return values_; }
  double eval(int c, const Vec& u) const { return eval_(c, u); }
  const std::function<double(int, const Vec&)>& evaluator() const { return eval_; }

private:
  Rep rep_ = Rep::Analytic;
  Vec values_;
  std::function<double(int, const Vec&)> eval_;
};

/* Symmetric 2-tensor on the domain (per-face matrices or an evaluator). */
class SymmetricTensorField {
public:
  static SymmetricTensorField on_faces(std::vector<Mat2> values);
  static SymmetricTensorField analytic(std::function<Mat(int, const Vec&)> f);

  bool is_mesh() const { return mesh_rep_; }
  const std::vector<Mat2>& face_values() const { return face_values_; }
  Mat eval(int c, const Vec& u) const { return eval_(c, u); }
  const std::function<Mat(int, const Vec&)>& evaluator() const { return eval_; }

private:
  bool mesh_rep_ = false;
  std::vector<Mat2> face_values_;
  std::function<Mat(int, const Vec&)> eval_;
};

/* Gaussian tangent perturbation of a vertex map (seeded, retracted). */
[[nodiscard]] DiscreteMap perturb_map(const DiscreteMap& map, double sigma,
                                      std::uint64_t seed);

} // namespace aharm
