#pragma once

#include "aharm/calculus.hpp"

namespace aharm {

/* alpha-energy E_alpha(psi) = INT (1 + |dpsi|^2)^alpha dV. Requires alpha >= 1. */
double alpha_energy(const DiscreteMap& map, double alpha);
double alpha_energy(const AnalyticMap& map, double alpha);
double alpha_energy(const MapState& map, double alpha);

/* Coordinate gradient of the discrete alpha-energy with respect to the vertex
 * values (includes the barycenter metric term for non-Euclidean targets). */
std::vector<Vec> alpha_energy_vertex_gradient(const DiscreteMap& map, double alpha);

/* Discrete tension fields: the negative mass-normalized L2 gradient,
 * tau_i = -(1/m_i) h^-1 P (dE/dpsi_i). tension_field uses the Dirichlet
 * energy 1/2 INT |dpsi|^2; alpha_tension_field uses E_alpha, and with
 * alpha = 1 equals exactly twice the classical tension. */
MeshField tension_field(const DiscreteMap& map);
MeshField alpha_tension_field(const DiscreteMap& map, double alpha);

/* Smooth tension fields at a chart point. */
Vec tension_at(const AnalyticMap& map, int chart, const Vec& u);
Vec alpha_tension_at(const AnalyticMap& map, double alpha, int chart, const Vec& u);

/* Field wrappers and norms. */
VariationField tension_field(const MapState& map);
VariationField alpha_tension_field(const MapState& map, double alpha);
double tension_l2_norm(const MapState& map);
double alpha_tension_l2_norm(const MapState& map, double alpha);
double alpha_tension_max_norm(const AnalyticMap& map, double alpha);

/* Central finite-difference gradient of the discrete energy along per-vertex
 * tangent bases (with retraction). Approaches the tangent-projected,
 * metric-raised coordinate gradient, i.e. -(lumped mass) * tau_alpha. */
MeshField fd_energy_gradient(const DiscreteMap& map, double alpha, double step);

struct GradCheckReport {
  double rel_l2_error = 0;  // |fd + m tau|_L2 / |fd|_L2
  double max_rel_error = 0; // worst single vertex
};
GradCheckReport gradient_consistency(const DiscreteMap& map, double alpha,
                                     double step = 1e-5);

/* Riemannian gradient descent on the discrete alpha-energy with Armijo
 * backtracking and Barzilai-Borwein step seeding. */
struct FlowOptions {
  int max_iters = 5000;
  double tension_tol = 1e-6;
  double initial_step = 1.0;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double min_step = 1e-14;
  bool bb_seeding = true;
};

enum class FlowTermination { TensionBelowTol, MaxIterations, LineSearchFailure };

struct FlowReport {
  FlowTermination reason = FlowTermination::MaxIterations;
  int iterations = 0;
  double initial_energy = 0;
  double final_energy = 0;
  double final_tension_norm = 0;
  std::vector<double> energy_trajectory; // energy after each accepted step
  std::vector<double> step_sizes;
};

FlowReport minimize_alpha_energy(DiscreteMap& map, double alpha, const FlowOptions& opts);

const char* to_string(FlowTermination t);

} // namespace aharm
