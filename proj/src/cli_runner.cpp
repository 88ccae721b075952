#include "aharm/cli_runner.hpp"

#include "aharm/catalog.hpp"
#include "aharm/conformal.hpp"
#include "aharm/report.hpp"
#include "aharm/stability.hpp"
#include "aharm/tensors.hpp"
#include "aharm/variational.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aharm {
namespace cli {
namespace {

using nlohmann::json;

/* Configuration problems map to exit code 2; everything thrown past run_cli's
 * dispatch is treated the same way, so library precondition failures (bad
 * meshes, non-harmonic inputs) also land on 2. Check failures never throw. */
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

[[noreturn]] void cfg_fail(const std::string& msg) { throw ConfigError(msg); }

/* Strict view of one JSON object: every key must be consumed through the view
 * before done(), which rejects leftovers by dotted path. An absent view
 * (present() == false) yields defaults everywhere. */
class ObjView {
public:
  ObjView() = default;
  ObjView(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ && !j_->is_object()) cfg_fail(where() + " must be an object");
  }

  bool present() const { return j_ != nullptr; }
  std::string where() const { return path_.empty() ? std::string("config") : path_; }
  std::string dotted(const std::string& k) const {
    return path_.empty() ? k : path_ + "." + k;
  }

  const json* maybe(const std::string& k) {
    if (!j_) return nullptr;
    used_.insert(k);
    if (!j_->contains(k)) return nullptr;
    return &j_->at(k);
  }
  const json& require(const std::string& k) {
    const json* p = maybe(k);
    if (!p) cfg_fail(dotted(k) + " is required");
    return *p;
  }

  double number(const std::string& k) { return as_number(require(k), dotted(k)); }
  double number_or(const std::string& k, double dflt) {
    const json* p = maybe(k);
    return p ? as_number(*p, dotted(k)) : dflt;
  }
  long long integer_or(const std::string& k, long long dflt) {
    const json* p = maybe(k);
    return p ? as_integer(*p, dotted(k)) : dflt;
  }
  bool flag_or(const std::string& k, bool dflt) {
    const json* p = maybe(k);
    if (!p) return dflt;
    if (!p->is_boolean()) cfg_fail(dotted(k) + " must be a boolean");
    return p->get<bool>();
  }
  std::string str(const std::string& k) { return as_str(require(k), dotted(k)); }
  std::string str_or(const std::string& k, const std::string& dflt) {
    const json* p = maybe(k);
    return p ? as_str(*p, dotted(k)) : dflt;
  }

  ObjView child(const std::string& k) { return ObjView(maybe(k), dotted(k)); }
  ObjView child_req(const std::string& k) {
    const json* p = maybe(k);
    if (!p) cfg_fail(dotted(k) + " is required");
    return ObjView(p, dotted(k));
  }

  void done() const {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!used_.count(it.key())) cfg_fail("unknown key '" + dotted(it.key()) + "'");
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) cfg_fail(where + " must be a number");
    return v.get<double>();
  }
  static long long as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
      cfg_fail(where + " must be an integer");
    return v.get<long long>();
  }
  static std::string as_str(const json& v, const std::string& where) {
    if (!v.is_string()) cfg_fail(where + " must be a string");
    return v.get<std::string>();
  }

private:
  const json* j_ = nullptr;
  std::string path_;
  std::set<std::string> used_;
};

Vec vec_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) cfg_fail(where + " must be a nonempty array of numbers");
  Vec out(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) cfg_fail(where + " must contain only numbers");
    out[static_cast<int>(i)] = v[i].get<double>();
  }
  return out;
}

Mat mat_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) cfg_fail(where + " must be a nonempty array of rows");
  size_t cols = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].empty()) cfg_fail(where + " rows must be nonempty arrays");
    if (i == 0) cols = v[i].size();
    if (v[i].size() != cols) cfg_fail(where + " rows must have equal length");
  }
  Mat out(static_cast<int>(v.size()), static_cast<int>(cols));
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = 0; j < cols; ++j) {
      if (!v[i][j].is_number()) cfg_fail(where + " must contain only numbers");
      out(static_cast<int>(i), static_cast<int>(j)) = v[i][j].get<double>();
    }
  return out;
}

struct SeedBox {
  bool present = false;
  std::uint64_t value = 0;
};

SeedBox parse_seed(ObjView& top) {
  const json* s = top.maybe("seed");
  if (!s) return {};
  long long v = ObjView::as_integer(*s, "seed");
  if (v < 0) cfg_fail("seed must be a nonnegative integer");
  return {true, static_cast<std::uint64_t>(v)};
}

std::vector<double> parse_alphas(ObjView& top) {
  const json* a = top.maybe("alpha");
  if (!a) return {};
  std::vector<double> out;
  if (a->is_number()) {
    out.push_back(a->get<double>());
  } else if (a->is_array()) {
    for (size_t i = 0; i < a->size(); ++i) {
      if (!(*a)[i].is_number()) cfg_fail("alpha entries must be numbers");
      out.push_back((*a)[i].get<double>());
    }
    if (out.empty()) cfg_fail("alpha must not be an empty array");
  } else {
    cfg_fail("alpha must be a number or an array of numbers");
  }
  for (double x : out)
    if (!(x >= 1.0)) cfg_fail("alpha values must be >= 1");
  return out;
}

/* Canonical echo of the parsed config (nlohmann objects iterate sorted, so
 * the echo is byte-stable for a fixed input). */
JsonValue echo_json(const json& j) {
  if (j.is_object()) {
    JsonValue o = JsonValue::object();
    for (auto it = j.begin(); it != j.end(); ++it) o.set(it.key(), echo_json(it.value()));
    return o;
  }
  if (j.is_array()) {
    JsonValue a = JsonValue::array();
    for (const auto& v : j) a.push(echo_json(v));
    return a;
  }
  if (j.is_boolean()) return JsonValue::boolean(j.get<bool>());
  if (j.is_number_integer() || j.is_number_unsigned())
    return JsonValue::integer(j.get<long long>());
  if (j.is_number()) return JsonValue::number(j.get<double>());
  if (j.is_string()) return JsonValue::str(j.get<std::string>());
  return JsonValue();
}

/* Every check reduces to "measured <= tolerance"; violations of boolean or
 * lower-bound assertions are encoded as nonnegative violation amounts. */
struct Check {
  std::string name;
  double measured = 0;
  double tolerance = 0;
  bool passed = false;
};

Check make_check(std::string name, double measured, double tolerance) {
  bool ok = measured <= tolerance; // NaN fails
  return {std::move(name), measured, tolerance, ok};
}

struct Series {
  std::string key;
  std::string suffix;
  std::string content;
};

struct RunOutput {
  JsonValue results = JsonValue::object();
  std::vector<Check> checks;
  std::vector<Series> series;
};

struct Ctx {
  ObjView top;
  std::string command;
  std::vector<double> alphas;
  SeedBox seed;
  bool verbose = false;
};

double single_alpha(const Ctx& c) {
  if (c.alphas.empty()) cfg_fail("alpha is required for " + c.command);
  if (c.alphas.size() != 1) cfg_fail(c.command + " needs exactly one alpha");
  return c.alphas[0];
}

std::string alpha_tag(const std::string& base, double a) {
  return base + "(alpha=" + format_double(a) + ")";
}

/* ---------------- domain and map construction ---------------- */

bool is_mesh_kind(const std::string& k) {
  return k == "sphere_identity" || k == "torus_winding" || k == "disk_map";
}

MeshPtr mesh_from_spec(ObjView& d, const std::string& dkind) {
  if (dkind == "icosphere") {
    long long sub = d.integer_or("subdivisions", 4);
    if (sub < 0 || sub > 8) cfg_fail("domain.subdivisions must lie in [0, 8]");
    d.done();
    return std::make_shared<DomainMesh>(DomainMesh::icosphere(static_cast<int>(sub)));
  }
  if (dkind == "torus_grid") {
    long long nu = d.integer_or("nu", 24);
    long long nv = d.integer_or("nv", 24);
    double r1 = d.number_or("r1", 1.0);
    double r2 = d.number_or("r2", 1.0);
    if (nu < 3 || nv < 3) cfg_fail("domain.nu and domain.nv must be >= 3");
    if (!(r1 > 0) || !(r2 > 0)) cfg_fail("domain radii must be positive");
    d.done();
    return std::make_shared<DomainMesh>(
        DomainMesh::torus_grid(static_cast<int>(nu), static_cast<int>(nv), r1, r2));
  }
  if (dkind == "mesh_file") {
    std::string path = d.str("path");
    d.done();
    return std::make_shared<DomainMesh>(load_mesh_file(path));
  }
  cfg_fail("domain.kind '" + dkind + "' is not a mesh domain (icosphere, torus_grid, mesh_file)");
}

void require_target(ObjView& t, const char* want, const std::string& map_kind) {
  if (!t.present()) return;
  std::string k = t.str("kind");
  if (k != want)
    cfg_fail("target.kind '" + k + "' does not match map.kind '" + map_kind + "' (expected '" +
             want + "')");
}

DiscreteMap build_mesh_map(ObjView& mapv, ObjView& domv, ObjView& tgtv, const std::string& kind,
                           const SeedBox& seed) {
  double sigma = mapv.number_or("perturb_sigma", 0.0);
  if (!(sigma >= 0)) cfg_fail("map.perturb_sigma must be >= 0");
  if (sigma > 0 && !seed.present) cfg_fail("map.perturb_sigma needs a top-level seed");
  std::string dkind = domv.str("kind");

  DiscreteMap out = [&]() -> DiscreteMap {
    if (kind == "sphere_identity") {
      if (dkind != "icosphere" && dkind != "mesh_file")
        cfg_fail("sphere_identity needs an icosphere or mesh_file domain");
      require_target(tgtv, "sphere", kind);
      return catalog::mesh_sphere_identity(mesh_from_spec(domv, dkind));
    }
    if (kind == "torus_winding") {
      if (dkind != "torus_grid") cfg_fail("torus_winding needs a torus_grid domain");
      double period = 2.0 * kPi;
      if (tgtv.present()) {
        require_target(tgtv, "flat_torus", kind);
        period = tgtv.number_or("period", period);
      }
      if (!(period > 0)) cfg_fail("target.period must be positive");
      Mat W = Mat::Identity(2, 2);
      if (const json* w = mapv.maybe("winding")) W = mat_from(*w, mapv.dotted("winding"));
      if (W.rows() != 2 || W.cols() != 2) cfg_fail("map.winding must be a 2x2 matrix");
      return catalog::mesh_torus_map(mesh_from_spec(domv, dkind),
                                     TargetManifold::flat_torus(2, period),
                                     [W](const Vec& u) { return Vec(W * u); });
    }
    if (kind == "disk_map") {
      if (dkind != "torus_grid") cfg_fail("disk_map needs a torus_grid domain");
      require_target(tgtv, "hyperbolic", kind);
      double r = mapv.number_or("radius", 0.3);
      if (!(r > 0 && r < TargetManifold::kDiskRadiusMax))
        cfg_fail("map.radius must lie strictly inside the unit disk");
      return catalog::mesh_torus_map(mesh_from_spec(domv, dkind),
                                     TargetManifold::hyperbolic_plane(), [r](const Vec& u) {
                                       Vec p(2);
                                       p << r * std::cos(u[0]), r * std::sin(u[1]);
                                       return p;
                                     });
    }
    cfg_fail("map.kind '" + kind + "' is not a mesh map (sphere_identity, torus_winding, disk_map)");
  }();

  mapv.done();
  tgtv.done();
  if (sigma > 0) out = perturb_map(out, sigma, seed.value);
  out.validate();
  return out;
}

void dom_kind_is(ObjView& d, const char* want, const std::string& map_kind) {
  if (!d.present()) return;
  std::string k = d.str("kind");
  if (k != want)
    cfg_fail("domain.kind '" + k + "' does not fit map.kind '" + map_kind + "' (expected '" +
             want + "')");
}

DomainPtr dom_sphere2(ObjView& d) {
  long long nt = d.integer_or("n_theta", 48);
  long long np = d.integer_or("n_phi", 96);
  if (nt < 4 || np < 4) cfg_fail("sphere2 resolution must be >= 4 nodes per axis");
  return catalog::sphere2_domain(1.0, static_cast<int>(nt), static_cast<int>(np));
}

DomainPtr dom_sphere3(ObjView& d) {
  long long nc = d.integer_or("n_chi", 24);
  long long nt = d.integer_or("n_theta", 24);
  long long np = d.integer_or("n_phi", 48);
  if (nc < 4 || nt < 4 || np < 4) cfg_fail("sphere3 resolution must be >= 4 nodes per axis");
  return catalog::sphere3_domain(1.0, static_cast<int>(nc), static_cast<int>(nt),
                                 static_cast<int>(np));
}

DomainPtr dom_circle(ObjView& d) {
  long long n = d.integer_or("n", 256);
  if (n < 8) cfg_fail("circle resolution must be >= 8 nodes");
  return catalog::circle_domain(static_cast<int>(n));
}

DomainPtr dom_torus(ObjView& d, int dim) {
  Vec periods = Vec::Constant(dim, 2.0 * kPi);
  const json* ps = d.maybe("periods");
  const json* p = d.maybe("period");
  if (ps && p) cfg_fail("give either domain.period or domain.periods, not both");
  if (ps) {
    periods = vec_from(*ps, d.dotted("periods"));
    if (periods.size() != dim)
      cfg_fail("domain.periods must have length " + std::to_string(dim));
  } else if (p) {
    periods = Vec::Constant(dim, ObjView::as_number(*p, d.dotted("period")));
  }
  for (int i = 0; i < dim; ++i)
    if (!(periods[i] > 0)) cfg_fail("domain periods must be positive");
  int dflt = std::clamp(static_cast<int>(std::floor(std::pow(8000.0, 1.0 / dim))), 4, 32);
  long long nodes = d.integer_or("nodes_per_axis", dflt);
  if (nodes < 3) cfg_fail("domain.nodes_per_axis must be >= 3");
  return catalog::torus_domain(periods, static_cast<int>(nodes));
}

AnalyticMap build_analytic_map(ObjView& mapv, ObjView& domv, const std::string& kind,
                               const std::vector<double>& alphas) {
  using namespace catalog;
  AnalyticMap built = [&]() -> AnalyticMap {
    if (kind == "identity_s2") {
      dom_kind_is(domv, "sphere2", kind);
      return identity_s2(dom_sphere2(domv));
    }
    if (kind == "identity_s3") {
      dom_kind_is(domv, "sphere3", kind);
      return identity_s3(dom_sphere3(domv));
    }
    if (kind == "latitude_stretch") {
      dom_kind_is(domv, "sphere2", kind);
      return latitude_stretch_s2(dom_sphere2(domv), mapv.number_or("amount", 0.2));
    }
    if (kind == "chi_stretch") {
      dom_kind_is(domv, "sphere3", kind);
      return chi_stretch_s3(dom_sphere3(domv), mapv.number_or("amount", 0.2));
    }
    if (kind == "twist") {
      dom_kind_is(domv, "sphere3", kind);
      return twist_s3(dom_sphere3(domv), mapv.number_or("amount", 0.3));
    }
    if (kind == "small_image") {
      dom_kind_is(domv, "sphere3", kind);
      double eps = mapv.number_or("eps", 0.1);
      if (!(eps > 0)) cfg_fail("map.eps must be positive");
      return small_image_s3(dom_sphere3(domv), eps);
    }
    if (kind == "equator_circle") {
      dom_kind_is(domv, "circle", kind);
      return equator_circle(dom_circle(domv));
    }
    if (kind == "hopf") {
      dom_kind_is(domv, "sphere3", kind);
      return hopf_map(dom_sphere3(domv));
    }
    if (kind == "torus_nonlinear") {
      dom_kind_is(domv, "torus", kind);
      return torus3_nonlinear(dom_torus(domv, 3), mapv.number_or("amount", 0.2));
    }
    if (kind == "torus_linear") {
      dom_kind_is(domv, "torus", kind);
      const json* w = mapv.maybe("winding");
      if (!w) cfg_fail("map.winding is required for torus_linear");
      Mat W = mat_from(*w, mapv.dotted("winding"));
      int n = static_cast<int>(W.rows());
      Vec tper = Vec::Constant(n, 2.0 * kPi);
      const json* tps = mapv.maybe("target_periods");
      const json* tp = mapv.maybe("target_period");
      if (tps && tp) cfg_fail("give either map.target_period or map.target_periods, not both");
      if (tps) {
        tper = vec_from(*tps, mapv.dotted("target_periods"));
        if (tper.size() != n)
          cfg_fail("map.target_periods must have length " + std::to_string(n));
      } else if (tp) {
        tper = Vec::Constant(n, ObjView::as_number(*tp, mapv.dotted("target_period")));
      }
      for (int i = 0; i < n; ++i)
        if (!(tper[i] > 0)) cfg_fail("target periods must be positive");
      return torus_linear(dom_torus(domv, static_cast<int>(W.cols())), W, tper);
    }
    if (kind == "torus_to_disk") {
      dom_kind_is(domv, "torus", kind);
      double r = mapv.number_or("radius", 0.3);
      if (!(r > 0 && r < TargetManifold::kDiskRadiusMax))
        cfg_fail("map.radius must lie strictly inside the unit disk");
      return torus_to_disk(dom_torus(domv, 2), r);
    }
    if (kind == "warped_fiber") {
      dom_kind_is(domv, "warped_circle_sphere", kind);
      std::string prof = mapv.str_or("profile", "reciprocal_sqrt");
      std::function<double(double)> w, wp;
      if (prof == "reciprocal_sqrt") {
        w = warp_reciprocal_sqrt;
        wp = warp_reciprocal_sqrt_prime;
      } else if (prof == "slow") {
        w = warp_slow;
        wp = warp_slow_prime;
      } else {
        cfg_fail("map.profile must be 'reciprocal_sqrt' or 'slow'");
      }
      long long nt = domv.integer_or("n_t", 24);
      long long nc = domv.integer_or("n_chi", 16);
      long long nth = domv.integer_or("n_theta", 16);
      long long np = domv.integer_or("n_phi", 32);
      if (nt < 4 || nc < 4 || nth < 4 || np < 4)
        cfg_fail("warped_circle_sphere resolution must be >= 4 nodes per axis");
      return warped_fiber_submersion(
          warped_circle_sphere_domain(w, wp, static_cast<int>(nt), static_cast<int>(nc),
                                      static_cast<int>(nth), static_cast<int>(np)));
    }
    if (kind == "doubly_warped") {
      dom_kind_is(domv, "doubly_warped_torus", kind);
      if (alphas.size() != 1)
        cfg_fail("map.kind 'doubly_warped' builds its domain from alpha and needs exactly one alpha");
      long long nodes = domv.integer_or("nodes_per_axis", 12);
      if (nodes < 4) cfg_fail("domain.nodes_per_axis must be >= 4");
      return doubly_warped_submersion(
          doubly_warped_torus_domain(alphas[0], static_cast<int>(nodes)));
    }
    cfg_fail("unknown analytic map.kind '" + kind + "'");
  }();

  mapv.done();
  domv.done();
  built.validate();
  return built;
}

MapState build_map_state(Ctx& c, std::string* label) {
  ObjView mapv = c.top.child_req("map");
  std::string kind = mapv.str("kind");
  if (label) *label = kind;
  if (is_mesh_kind(kind)) {
    ObjView domv = c.top.child_req("domain");
    ObjView tgtv = c.top.child("target");
    return MapState(build_mesh_map(mapv, domv, tgtv, kind, c.seed));
  }
  ObjView domv = c.top.child("domain");
  return MapState(build_analytic_map(mapv, domv, kind, c.alphas));
}

DiscreteMap build_mesh_only(Ctx& c) {
  ObjView mapv = c.top.child_req("map");
  std::string kind = mapv.str("kind");
  if (!is_mesh_kind(kind))
    cfg_fail(c.command + " needs a mesh map (sphere_identity, torus_winding, disk_map)");
  ObjView domv = c.top.child_req("domain");
  ObjView tgtv = c.top.child("target");
  return build_mesh_map(mapv, domv, tgtv, kind, c.seed);
}

AnalyticMap build_analytic_only(Ctx& c, std::string* label) {
  ObjView mapv = c.top.child_req("map");
  std::string kind = mapv.str("kind");
  if (label) *label = kind;
  if (is_mesh_kind(kind)) cfg_fail(c.command + " needs an analytic map");
  ObjView domv = c.top.child("domain");
  return build_analytic_map(mapv, domv, kind, c.alphas);
}

FlowOptions parse_solver(ObjView& sv) {
  FlowOptions fo;
  if (!sv.present()) return fo;
  fo.max_iters = static_cast<int>(sv.integer_or("max_iters", fo.max_iters));
  fo.tension_tol = sv.number_or("tension_tol", fo.tension_tol);
  fo.initial_step = sv.number_or("initial_step", fo.initial_step);
  fo.armijo_c = sv.number_or("armijo_c", fo.armijo_c);
  fo.backtrack_factor = sv.number_or("backtrack_factor", fo.backtrack_factor);
  fo.min_step = sv.number_or("min_step", fo.min_step);
  fo.bb_seeding = sv.flag_or("bb_seeding", fo.bb_seeding);
  if (fo.max_iters < 1) cfg_fail("solver.max_iters must be >= 1");
  if (!(fo.tension_tol > 0)) cfg_fail("solver.tension_tol must be positive");
  if (!(fo.initial_step > 0)) cfg_fail("solver.initial_step must be positive");
  if (!(fo.armijo_c > 0 && fo.armijo_c < 1)) cfg_fail("solver.armijo_c must lie in (0, 1)");
  if (!(fo.backtrack_factor > 0 && fo.backtrack_factor < 1))
    cfg_fail("solver.backtrack_factor must lie in (0, 1)");
  if (!(fo.min_step > 0)) cfg_fail("solver.min_step must be positive");
  sv.done();
  return fo;
}

/* Deterministic trigonometric test fields covering all chart directions. */
std::vector<DomainVectorField> make_fields(int dim, int count) {
  std::vector<DomainVectorField> out;
  for (int k = 0; k < count; ++k) {
    out.push_back([dim, k](int, const Vec& u) {
      Vec Y(dim);
      for (int i = 0; i < dim; ++i) {
        double s = u[(i + k) % dim] + 0.15 * k + 0.35 * i;
        Y[i] = ((i + k) % 2 == 0) ? std::sin(s) : std::cos(s);
      }
      return Y;
    });
  }
  return out;
}

JsonValue flow_summary(const FlowReport& fr, double tension_tol) {
  JsonValue o = JsonValue::object();
  o.set("termination", JsonValue::str(to_string(fr.reason)));
  o.set("iterations", JsonValue::integer(fr.iterations));
  o.set("initial_energy", JsonValue::number(fr.initial_energy));
  o.set("final_energy", JsonValue::number(fr.final_energy));
  o.set("final_tension_norm", JsonValue::number(fr.final_tension_norm));
  o.set("tension_tol", JsonValue::number(tension_tol));
  return o;
}

std::string trajectory_csv(const FlowReport& fr) {
  CsvWriter csv({"iteration", "energy", "step"});
  csv.row({format_int(0), format_double(fr.initial_energy), format_double(0.0)});
  for (size_t i = 0; i < fr.energy_trajectory.size(); ++i) {
    double step = i < fr.step_sizes.size() ? fr.step_sizes[i] : 0.0;
    csv.row({format_int(static_cast<long long>(i + 1)), format_double(fr.energy_trajectory[i]),
             format_double(step)});
  }
  return csv.str();
}

/* ---------------- subcommand handlers ---------------- */

RunOutput cmd_energy(Ctx& c) {
  if (c.alphas.empty()) cfg_fail("alpha is required for energy");
  std::string label;
  MapState st = build_map_state(c, &label);
  ObjView checks = c.top.child("checks");
  const json* exp = checks.maybe("expected_energy");
  double expected = exp ? ObjView::as_number(*exp, "checks.expected_energy") : 0.0;
  checks.done();
  ObjView tol = c.top.child("tolerances");
  double erel = tol.number_or("energy_rel_tol", 0.005);
  tol.done();
  if (exp && c.alphas.size() != 1) cfg_fail("checks.expected_energy needs a single alpha");
  c.top.done();

  RunOutput out;
  JsonValue arr = JsonValue::array();
  double last = 0;
  for (double a : c.alphas) {
    last = alpha_energy(st, a);
    JsonValue e = JsonValue::object();
    e.set("alpha", JsonValue::number(a));
    e.set("energy", JsonValue::number(last));
    arr.push(std::move(e));
  }
  out.results.set("map", JsonValue::str(label));
  out.results.set("energies", std::move(arr));
  if (exp)
    out.checks.push_back(make_check(
        "energy_matches_expected",
        std::abs(last - expected) / std::max(std::abs(expected), 1e-300), erel));
  return out;
}

RunOutput cmd_flow(Ctx& c) {
  double a = single_alpha(c);
  DiscreteMap map = build_mesh_only(c);
  ObjView sol = c.top.child("solver");
  FlowOptions fo = parse_solver(sol);
  ObjView checks = c.top.child("checks");
  const json* exp = checks.maybe("expected_energy");
  double expected = exp ? ObjView::as_number(*exp, "checks.expected_energy") : 0.0;
  bool require_conv = checks.flag_or("require_convergence", true);
  checks.done();
  ObjView tol = c.top.child("tolerances");
  double erel = tol.number_or("energy_rel_tol", 0.005);
  double mono_slack = tol.number_or("monotone_slack", 1e-12);
  tol.done();
  c.top.done();

  FlowReport fr = minimize_alpha_energy(map, a, fo);
  double up = 0, prev = fr.initial_energy;
  for (double e : fr.energy_trajectory) {
    up = std::max(up, e - prev);
    prev = e;
  }

  RunOutput out;
  out.results = [&] {
    JsonValue r = JsonValue::object();
    r.set("alpha", JsonValue::number(a));
    r.set("termination", JsonValue::str(to_string(fr.reason)));
    r.set("iterations", JsonValue::integer(fr.iterations));
    r.set("initial_energy", JsonValue::number(fr.initial_energy));
    r.set("final_energy", JsonValue::number(fr.final_energy));
    r.set("final_tension_norm", JsonValue::number(fr.final_tension_norm));
    r.set("tension_tol", JsonValue::number(fo.tension_tol));
    r.set("max_energy_increase", JsonValue::number(up));
    r.set("accepted_steps", JsonValue::integer(static_cast<long long>(fr.energy_trajectory.size())));
    return r;
  }();
  if (require_conv)
    out.checks.push_back(make_check("flow_converged", fr.final_tension_norm, fo.tension_tol));
  out.checks.push_back(make_check("energy_monotone", up, mono_slack));
  if (exp)
    out.checks.push_back(make_check(
        "energy_matches_expected",
        std::abs(fr.final_energy - expected) / std::max(std::abs(expected), 1e-300), erel));
  out.series.push_back({"energy_trajectory", "energy.csv", trajectory_csv(fr)});
  return out;
}

RunOutput cmd_gradcheck(Ctx& c) {
  if (c.alphas.empty()) cfg_fail("alpha is required for gradcheck");
  DiscreteMap map = build_mesh_only(c);
  ObjView tol = c.top.child("tolerances");
  double grad_tol = tol.number_or("gradient_rel_tol", 1e-3);
  double fd_step = tol.number_or("fd_step", 1e-5);
  tol.done();
  if (!(fd_step > 0)) cfg_fail("tolerances.fd_step must be positive");
  c.top.done();

  RunOutput out;
  JsonValue cases = JsonValue::array();
  for (double a : c.alphas) {
    GradCheckReport rep = gradient_consistency(map, a, fd_step);
    JsonValue e = JsonValue::object();
    e.set("alpha", JsonValue::number(a));
    e.set("rel_l2_error", JsonValue::number(rep.rel_l2_error));
    e.set("max_rel_error", JsonValue::number(rep.max_rel_error));
    cases.push(std::move(e));
    out.checks.push_back(make_check(alpha_tag("gradient_rel_l2", a), rep.rel_l2_error, grad_tol));
  }
  out.results.set("fd_step", JsonValue::number(fd_step));
  out.results.set("cases", std::move(cases));
  return out;
}

RunOutput cmd_conformal_check(Ctx& c) {
  if (c.alphas.empty()) cfg_fail("alpha is required for conformal-check");
  std::string label;
  AnalyticMap map = build_analytic_only(c, &label);
  if (map.domain->dim() < 3) cfg_fail("conformal-check needs a domain of dimension >= 3");
  ObjView tol = c.top.child("tolerances");
  double rtol = tol.number_or("residual_tol", 1e-8);
  tol.done();
  c.top.done();

  RunOutput out;
  out.results.set("map", JsonValue::str(label));
  out.results.set("m", JsonValue::integer(map.domain->dim()));
  JsonValue cases = JsonValue::array();
  for (double a : c.alphas) {
    ConformalEquivalenceReport rep = check_conformal_equivalence(map, a);
    JsonValue e = JsonValue::object();
    e.set("alpha", JsonValue::number(a));
    e.set("identity_residual", JsonValue::number(rep.max_identity_residual));
    e.set("law_residual", JsonValue::number(rep.max_law_residual));
    e.set("min_singular_value", JsonValue::number(rep.min_singular_value));
    cases.push(std::move(e));
    out.checks.push_back(
        make_check(alpha_tag("conformal_identity", a), rep.max_identity_residual, rtol));
    out.checks.push_back(
        make_check(alpha_tag("transformation_law", a), rep.max_law_residual, rtol));
  }
  out.results.set("cases", std::move(cases));
  return out;
}

RunOutput cmd_hong_check(Ctx& c) {
  double a = single_alpha(c);
  long long m = 0;
  {
    const json* mv = c.top.maybe("m");
    if (!mv) cfg_fail("m (domain dimension) is required for hong-check");
    m = ObjView::as_integer(*mv, "m");
    if (m < 3) cfg_fail("m must be >= 3");
  }
  double eps_cap = c.top.number_or("eps_cap", 10.0);
  long long samples = c.top.integer_or("samples", 1000);
  if (!(eps_cap > 0)) cfg_fail("eps_cap must be positive");
  if (samples < 10) cfg_fail("samples must be >= 10");

  std::optional<AnalyticMap> built;
  {
    ObjView mapv = c.top.child("map");
    ObjView domv = c.top.child("domain");
    if (mapv.present()) {
      std::string kind = mapv.str("kind");
      if (is_mesh_kind(kind)) cfg_fail("hong-check needs an analytic map");
      built.emplace(build_analytic_map(mapv, domv, kind, c.alphas));
    } else if (domv.present()) {
      cfg_fail("domain without map has no effect for hong-check");
    }
  }
  if (built && built->domain->dim() != m)
    cfg_fail("map domain dimension " + std::to_string(built->domain->dim()) +
             " does not match m = " + std::to_string(m));

  ObjView tol = c.top.child("tolerances");
  double roundtrip_tol = tol.number_or("roundtrip_tol", 1e-12);
  double implicit_tol = tol.number_or("implicit_tol", 1e-10);
  double density_tol = tol.number_or("density_residual_tol", 1e-8);
  double construction_tol = tol.number_or("construction_tol", 1e-8);
  double harmonic_tol = tol.number_or("harmonic_tol", 1e-8);
  tol.done();
  c.top.done();

  using namespace smallenergy;
  ValidityInterval iv = validity_interval(a, static_cast<int>(m), eps_cap,
                                          static_cast<int>(samples));

  const int P = 1000;
  double rt = 0;
  for (int i = 0; i < P; ++i) {
    double s = 2.0 * a + 100.0 * i / (P - 1);
    double k = h_prime_inverse(s, a);
    rt = std::max(rt, std::abs(h_prime(k, a) - s) / std::max(1.0, std::abs(s)));
  }
  double imp = 0;
  for (int i = 0; i < P; ++i) {
    double y = iv.eps_prime * i / (P - 1);
    double th = theta(y, iv);
    double rhs = std::pow(th, static_cast<double>(m - 2));
    imp = std::max(imp, std::abs(h_prime(y * th * th, a) - rhs) / rhs);
  }

  RunOutput out;
  out.results.set("alpha", JsonValue::number(a));
  out.results.set("m", JsonValue::integer(m));
  out.results.set("roundtrip_max_error", JsonValue::number(rt));
  out.results.set("implicit_max_error", JsonValue::number(imp));
  JsonValue ivj = JsonValue::object();
  ivj.set("u_lo", JsonValue::number(iv.u_lo));
  ivj.set("u_hi", JsonValue::number(iv.u_hi));
  ivj.set("eps_prime", JsonValue::number(iv.eps_prime));
  ivj.set("monotonic_margin", JsonValue::number(iv.monotonic_margin));
  ivj.set("samples", JsonValue::integer(iv.samples));
  out.results.set("interval", std::move(ivj));
  out.checks.push_back(make_check("profile_roundtrip", rt, roundtrip_tol));
  out.checks.push_back(make_check("implicit_identity", imp, implicit_tol));
  out.checks.push_back(
      make_check("interval_monotone", std::max(0.0, -iv.monotonic_margin), 0.0));

  if (built) {
    BuildReport br = make_alpha_harmonic_metric(*built, a, harmonic_tol);
    JsonValue cj = JsonValue::object();
    cj.set("input_tension_l2", JsonValue::number(br.input_tension_l2));
    cj.set("max_half_density", JsonValue::number(br.max_half_density));
    cj.set("density_identity_residual", JsonValue::number(br.identity_residual));
    cj.set("alpha_tension_l2", JsonValue::number(br.alpha_tension_l2));
    cj.set("alpha_tension_max", JsonValue::number(br.alpha_tension_max));
    out.results.set("construction", std::move(cj));
    out.checks.push_back(make_check("density_identity", br.identity_residual, density_tol));
    out.checks.push_back(
        make_check("construction_tension", br.alpha_tension_l2, construction_tol));
  }
  return out;
}

RunOutput cmd_tensor_check(Ctx& c) {
  if (c.alphas.empty()) cfg_fail("alpha is required for tensor-check");
  long long nfields = c.top.integer_or("fields", 3);
  if (nfields < 1 || nfields > 8) cfg_fail("fields must lie in [1, 8]");
  ObjView tol = c.top.child("tolerances");
  double div_tol = tol.number_or("divergence_tol", 1e-8);
  double trace_tol = tol.number_or("trace_tol", 1e-12);
  tol.done();

  std::vector<std::pair<std::string, AnalyticMap>> maps;
  const json* multi = c.top.maybe("maps");
  if (multi) {
    if (c.top.maybe("map") || c.top.maybe("domain"))
      cfg_fail("with maps, put per-entry domains inside each entry");
    if (!multi->is_array() || multi->empty()) cfg_fail("maps must be a nonempty array");
    for (size_t i = 0; i < multi->size(); ++i) {
      std::string path = "maps[" + std::to_string(i) + "]";
      ObjView mv(&(*multi)[i], path);
      std::string kind = mv.str("kind");
      if (is_mesh_kind(kind)) cfg_fail("tensor-check needs analytic maps");
      ObjView dv = mv.child("domain");
      maps.emplace_back(kind + "#" + std::to_string(i),
                        build_analytic_map(mv, dv, kind, c.alphas));
    }
  } else {
    std::string label;
    maps.emplace_back("", build_analytic_only(c, &label));
    maps.back().first = label;
  }
  c.top.done();

  RunOutput out;
  JsonValue cases = JsonValue::array();
  for (const auto& [label, map] : maps) {
    std::vector<DomainVectorField> fields =
        make_fields(map.domain->dim(), static_cast<int>(nfields));
    for (double a : c.alphas) {
      StressDivergenceReport rep = check_stress_divergence(map, a, fields);
      JsonValue e = JsonValue::object();
      e.set("map", JsonValue::str(label));
      e.set("alpha", JsonValue::number(a));
      e.set("max_divergence_residual", JsonValue::number(rep.max_residual));
      e.set("max_trace_residual", JsonValue::number(rep.max_trace_residual));
      cases.push(std::move(e));
      std::string tag = "(" + label + ",alpha=" + format_double(a) + ")";
      out.checks.push_back(make_check("stress_divergence" + tag, rep.max_residual, div_tol));
      out.checks.push_back(make_check("stress_trace" + tag, rep.max_trace_residual, trace_tol));
    }
  }
  out.results.set("field_count", JsonValue::integer(nfields));
  out.results.set("cases", std::move(cases));
  return out;
}

RunOutput cmd_fiber_check(Ctx& c) {
  double a = single_alpha(c);
  std::string label;
  {
    // restrict to the submersion catalog before building anything
    ObjView probe = c.top.child_req("map");
    std::string kind = probe.str("kind");
    if (kind != "hopf" && kind != "warped_fiber" && kind != "doubly_warped")
      cfg_fail("fiber-check needs a submersion map (hopf, warped_fiber, doubly_warped)");
  }
  AnalyticMap map = build_analytic_only(c, &label);
  ObjView checks = c.top.child("checks");
  const json* exp_mu = checks.maybe("expected_dilation_sq");
  double expected_mu = exp_mu ? ObjView::as_number(*exp_mu, "checks.expected_dilation_sq") : 0.0;
  const json* hmax = checks.maybe("fiber_mean_curvature_max");
  double hmax_tol = hmax ? ObjView::as_number(*hmax, "checks.fiber_mean_curvature_max") : 0.0;
  checks.done();
  ObjView tol = c.top.child("tolerances");
  double vanish_tol = tol.number_or("vanish_tol", 1e-8);
  double harmonic_tol = tol.number_or("harmonic_tol", 1e-6);
  double balance_tol = tol.number_or("balance_tol", 1e-6);
  double two_path_tol = tol.number_or("two_path_tol", 1e-8);
  double dilation_tol = tol.number_or("dilation_tol", 1e-8);
  tol.done();
  c.top.done();

  SubmersionMap sub(map);
  MinimalFiberReport mf = check_minimal_fibers(sub, a, vanish_tol, harmonic_tol);

  const AnalyticDomain& D = *map.domain;
  double mu_lo = std::numeric_limits<double>::infinity(), mu_hi = 0;
  double two_path = 0, mu_dev = 0;
  for (size_t ci = 0; ci < D.rules.size(); ++ci) {
    const QuadratureRule& R = D.rules[ci];
    int N = static_cast<int>(R.nodes.rows());
    int stride = std::max(1, N / 128);
    for (int i = 0; i < N; i += stride) {
      Vec u = R.nodes.row(i).transpose();
      double mu2 = sub.dilation_sq(static_cast<int>(ci), u);
      mu_lo = std::min(mu_lo, mu2);
      mu_hi = std::max(mu_hi, mu2);
      Vec Hb = sub.horizontal_mean_curvature(static_cast<int>(ci), u);
      Vec Hb2 = sub.horizontal_mean_curvature_via_dilation(static_cast<int>(ci), u);
      Vec d = Hb - Hb2;
      Mat g = D.metric(static_cast<int>(ci), u);
      two_path = std::max(two_path, std::sqrt(std::max(0.0, d.dot(g * d))));
      if (exp_mu) mu_dev = std::max(mu_dev, std::abs(mu2 - expected_mu));
    }
  }

  RunOutput out;
  out.results.set("map", JsonValue::str(label));
  out.results.set("alpha", JsonValue::number(a));
  out.results.set("m", JsonValue::integer(mf.m));
  out.results.set("n", JsonValue::integer(mf.n));
  out.results.set("fiber_dim", JsonValue::integer(mf.q));
  out.results.set("hypotheses_ok", JsonValue::boolean(mf.hypotheses_ok));
  if (!mf.hypothesis_message.empty())
    out.results.set("hypothesis_message", JsonValue::str(mf.hypothesis_message));
  out.results.set("alpha_tension_l2", JsonValue::number(mf.alpha_tension_l2));
  out.results.set("dilation_sq_min", JsonValue::number(mu_lo));
  out.results.set("dilation_sq_max", JsonValue::number(mu_hi));
  out.results.set("max_fiber_mean_curvature", JsonValue::number(mf.max_fiber_mean_curvature));
  out.results.set("max_horizontal_grad", JsonValue::number(mf.max_horizontal_grad));
  out.results.set("max_balance_residual", JsonValue::number(mf.max_balance_residual));
  out.results.set("mean_curvature_two_path_diff", JsonValue::number(two_path));
  out.results.set("fibers_minimal", JsonValue::boolean(mf.fibers_minimal));
  out.results.set("horizontal_grad_zero", JsonValue::boolean(mf.horizontal_grad_zero));
  out.results.set("equivalence_consistent", JsonValue::boolean(mf.equivalence_consistent));

  out.checks.push_back(make_check("mean_curvature_two_path", two_path, two_path_tol));
  if (mf.hypotheses_ok) {
    out.checks.push_back(make_check("fiber_balance", mf.max_balance_residual, balance_tol));
    out.checks.push_back(
        make_check("minimal_fiber_equivalence", mf.equivalence_consistent ? 0.0 : 1.0, 0.0));
  }
  if (exp_mu)
    out.checks.push_back(make_check("dilation_matches_expected", mu_dev, dilation_tol));
  if (hmax)
    out.checks.push_back(
        make_check("fiber_mean_curvature_max", mf.max_fiber_mean_curvature, hmax_tol));
  return out;
}

RunOutput cmd_stability(Ctx& c) {
  double a = single_alpha(c);
  DiscreteMap map = build_mesh_only(c);
  ObjView flowv = c.top.child("flow");
  bool do_flow = flowv.present();
  FlowOptions fo = parse_solver(flowv);
  ObjView checks = c.top.child("checks");
  const json* floorv = checks.maybe("lambda_min_floor");
  double lambda_floor = floorv ? ObjView::as_number(*floorv, "checks.lambda_min_floor") : 0.0;
  checks.done();
  ObjView tol = c.top.child("tolerances");
  double sym_tol = tol.number_or("symmetry_tol", 1e-12);
  tol.done();
  c.top.done();

  RunOutput out;
  if (do_flow) {
    FlowReport fr = minimize_alpha_energy(map, a, fo);
    out.results.set("flow", flow_summary(fr, fo.tension_tol));
    out.checks.push_back(make_check("flow_converged", fr.final_tension_norm, fo.tension_tol));
  }

  IndexMatrix ix = assemble_index_matrix(map, a);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ix.A, Mat(ix.mass.asDiagonal()));
  if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigensolver failed");
  Vec evals = es.eigenvalues();

  out.results.set("alpha", JsonValue::number(a));
  out.results.set("vertices", JsonValue::integer(map.mesh->num_vertices()));
  out.results.set("dofs", JsonValue::integer(ix.A.rows()));
  out.results.set("symmetry_defect", JsonValue::number(ix.symmetry_defect));
  out.results.set("lambda_min", JsonValue::number(evals[0]));
  out.results.set("lambda_max", JsonValue::number(evals[evals.size() - 1]));
  out.checks.push_back(make_check("index_symmetry", ix.symmetry_defect, sym_tol));
  if (floorv)
    out.checks.push_back(
        make_check("lambda_min_floor", std::max(0.0, lambda_floor - evals[0]), 0.0));

  CsvWriter csv({"index", "eigenvalue"});
  for (int i = 0; i < evals.size(); ++i)
    csv.row({format_int(i), format_double(evals[i])});
  out.series.push_back({"eigenvalues", "eigenvalues.csv", csv.str()});
  out.series.push_back({"index_matrix", "matrix.csv", coordinate_text(ix.A)});
  return out;
}

RunOutput cmd_sphere_instability(Ctx& c) {
  double a = single_alpha(c);
  std::string label;
  MapState st = build_map_state(c, &label);
  if (st.target().kind() != TargetManifold::Kind::Sphere)
    cfg_fail("sphere-instability needs a sphere-target map");
  bool mesh = st.is_mesh();
  ObjView flowv = c.top.child("flow");
  bool do_flow = flowv.present();
  if (do_flow && !mesh) cfg_fail("the flow stage applies to mesh maps only");
  FlowOptions fo = parse_solver(flowv);
  ObjView checks = c.top.child("checks");
  const json* exp = checks.maybe("expected_sum");
  double expected = exp ? ObjView::as_number(*exp, "checks.expected_sum") : 0.0;
  double sum_rel_tol = checks.number_or("sum_rel_tol", 1e-3);
  checks.done();
  ObjView tol = c.top.child("tolerances");
  double two_path_tol = tol.number_or("two_path_tol", mesh ? 1e-3 : 1e-8);
  double harmonic_tol = tol.number_or("harmonic_tol", 1e-6);
  double integrand_zero_tol = tol.number_or("integrand_zero_tol", 1e-10);
  tol.done();
  c.top.done();

  RunOutput out;
  if (do_flow) {
    FlowReport fr = minimize_alpha_energy(st.mesh(), a, fo);
    out.results.set("flow", flow_summary(fr, fo.tension_tol));
    out.checks.push_back(make_check("flow_converged", fr.final_tension_norm, fo.tension_tol));
  }

  InstabilityCertificate cert = instability_certificate(st, a, harmonic_tol);
  int n = st.target().dim();
  std::string verdict = !cert.bound_meaningful ? "bound vacuous"
                        : cert.hypothesis      ? "instability certificate"
                                               : "no certificate";

  out.results.set("map", JsonValue::str(label));
  out.results.set("alpha", JsonValue::number(a));
  out.results.set("n", JsonValue::integer(n));
  out.results.set("representation", JsonValue::str(mesh ? "mesh" : "analytic"));
  out.results.set("tension_norm", JsonValue::number(cert.sum.tension_norm));
  out.results.set("index_path", JsonValue::number(cert.sum.index_path));
  out.results.set("integral_path", JsonValue::number(cert.sum.integral_path));
  out.results.set("rel_mismatch", JsonValue::number(cert.sum.rel_mismatch));
  out.results.set("rayleigh_witness", JsonValue::number(cert.sum.rayleigh_witness));
  out.results.set("bound_meaningful", JsonValue::boolean(cert.bound_meaningful));
  out.results.set("bound", JsonValue::number(cert.bound));
  out.results.set("min_density", JsonValue::number(cert.min_density));
  out.results.set("max_density", JsonValue::number(cert.max_density));
  out.results.set("hypothesis", JsonValue::boolean(cert.hypothesis));
  out.results.set("unstable", JsonValue::boolean(cert.unstable));
  out.results.set("consistent", JsonValue::boolean(cert.consistent));
  out.results.set("verdict", JsonValue::str(verdict));

  out.checks.push_back(make_check("frame_sum_two_path", cert.sum.rel_mismatch, two_path_tol));
  out.checks.push_back(make_check("certificate_consistent", cert.consistent ? 0.0 : 1.0, 0.0));
  if (cert.bound_meaningful && cert.bound > 0) {
    double interior_max = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 1000; ++i)
      interior_max = std::max(interior_max, frame_integrand(cert.bound * i / 1000.0, a, n));
    double at_bound = frame_integrand(cert.bound, a, n);
    out.results.set("integrand_interior_max", JsonValue::number(interior_max));
    out.results.set("integrand_at_bound", JsonValue::number(at_bound));
    out.checks.push_back(
        make_check("integrand_negative_below_bound", std::max(0.0, interior_max), 0.0));
    out.checks.push_back(
        make_check("integrand_vanishes_at_bound", std::abs(at_bound), integrand_zero_tol));
  }
  if (exp)
    out.checks.push_back(make_check(
        "frame_sum_matches_expected",
        std::abs(cert.sum.index_path - expected) / std::max(std::abs(expected), 1e-300),
        sum_rel_tol));
  return out;
}

RunOutput cmd_frame_identities(Ctx& c) {
  if (!c.alphas.empty()) cfg_fail("lemma73 does not take alpha (the identities hold for all alpha)");
  std::string label;
  AnalyticMap map = build_analytic_only(c, &label);
  if (map.target.kind() != TargetManifold::Kind::Sphere)
    cfg_fail("lemma73 needs a sphere-target map");
  ObjView tol = c.top.child("tolerances");
  double frame_tol = tol.number_or("frame_tol", 1e-10);
  tol.done();
  c.top.done();

  FrameIdentityReport rep = check_parallel_field_identities(map);
  RunOutput out;
  out.results.set("map", JsonValue::str(label));
  out.results.set("cov_residual", JsonValue::number(rep.max_cov_residual));
  out.results.set("pairing_residual", JsonValue::number(rep.max_pairing_residual));
  out.results.set("norm_residual", JsonValue::number(rep.max_norm_residual));
  out.results.set("curvature_residual", JsonValue::number(rep.max_curvature_residual));
  out.checks.push_back(make_check("covariant_identity", rep.max_cov_residual, frame_tol));
  out.checks.push_back(make_check("pairing_identity", rep.max_pairing_residual, frame_tol));
  out.checks.push_back(make_check("norm_identity", rep.max_norm_residual, frame_tol));
  out.checks.push_back(make_check("curvature_identity", rep.max_curvature_residual, frame_tol));
  return out;
}

/* ---------------- dispatch and report assembly ---------------- */

const std::vector<std::pair<std::string, RunOutput (*)(Ctx&)>>& command_table() {
  static const std::vector<std::pair<std::string, RunOutput (*)(Ctx&)>> table = {
      {"energy", cmd_energy},
      {"flow", cmd_flow},
      {"gradcheck", cmd_gradcheck},
      {"conformal-check", cmd_conformal_check},
      {"hong-check", cmd_hong_check},
      {"tensor-check", cmd_tensor_check},
      {"fiber-check", cmd_fiber_check},
      {"stability", cmd_stability},
      {"sphere-instability", cmd_sphere_instability},
      {"lemma73", cmd_frame_identities},
  };
  return table;
}

std::string series_path(const std::string& out_path, const std::string& suffix) {
  std::string stem = out_path;
  if (stem.size() > 5 && stem.compare(stem.size() - 5, 5, ".json") == 0)
    stem.resize(stem.size() - 5);
  return stem + "_" + suffix;
}

int run_config(const std::string& config_path, const std::string& sub_cmd,
               const std::string& out_flag, bool reproducible, bool verbose) {
  json raw;
  try {
    raw = json::parse(read_text_file(config_path));
  } catch (const std::exception& e) {
    cfg_fail(std::string(e.what()));
  }

  ObjView top(&raw, "");
  std::string cfg_cmd = top.str_or("command", "");
  std::string cmd = !cfg_cmd.empty() ? cfg_cmd : sub_cmd;
  if (cmd.empty()) cfg_fail("no command: pass a subcommand or set 'command' in the config");
  if (!sub_cmd.empty() && !cfg_cmd.empty() && sub_cmd != cfg_cmd)
    cfg_fail("subcommand '" + sub_cmd + "' does not match config command '" + cfg_cmd + "'");

  RunOutput (*handler)(Ctx&) = nullptr;
  for (const auto& [name, fn] : command_table())
    if (name == cmd) handler = fn;
  if (!handler) cfg_fail("unknown command '" + cmd + "'");

  std::string out_path = !out_flag.empty() ? out_flag : top.str_or("output", "");

  Ctx ctx;
  ctx.command = cmd;
  ctx.alphas = parse_alphas(top);
  ctx.seed = parse_seed(top);
  ctx.verbose = verbose;
  ctx.top = std::move(top);

  if (verbose) std::fprintf(stderr, "running %s\n", cmd.c_str());
  auto t0 = std::chrono::steady_clock::now();
  RunOutput ro = handler(ctx);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool all_passed = true;
  const Check* first_failed = nullptr;
  for (const Check& ch : ro.checks) {
    if (!ch.passed && !first_failed) first_failed = &ch;
    all_passed = all_passed && ch.passed;
    if (verbose)
      std::fprintf(stderr, "  [%s] %s  measured %s  tolerance %s\n", ch.passed ? "ok" : "FAIL",
                   ch.name.c_str(), format_double(ch.measured).c_str(),
                   format_double(ch.tolerance).c_str());
  }

  JsonValue report = JsonValue::object();
  report.set("schema", JsonValue::integer(1));
  report.set("command", JsonValue::str(cmd));
  report.set("config", echo_json(raw));
  report.set("results", std::move(ro.results));
  JsonValue checks = JsonValue::array();
  for (const Check& ch : ro.checks) {
    JsonValue e = JsonValue::object();
    e.set("name", JsonValue::str(ch.name));
    e.set("passed", JsonValue::boolean(ch.passed));
    e.set("measured", JsonValue::number(ch.measured));
    e.set("tolerance", JsonValue::number(ch.tolerance));
    checks.push(std::move(e));
  }
  report.set("checks", std::move(checks));
  report.set("passed", JsonValue::boolean(all_passed));
  if (!out_path.empty() && !ro.series.empty()) {
    JsonValue sj = JsonValue::object();
    for (const Series& s : ro.series) sj.set(s.key, JsonValue::str(series_path(out_path, s.suffix)));
    report.set("series", std::move(sj));
  }
  if (!reproducible) {
    JsonValue tj = JsonValue::object();
    tj.set("total_seconds", JsonValue::number(seconds));
    report.set("timings", std::move(tj));
  }

  std::string text = report.dump(2) + "\n";
  if (!out_path.empty()) {
    write_text_file(out_path, text);
    for (const Series& s : ro.series)
      write_text_file(series_path(out_path, s.suffix), s.content);
  } else {
    std::fputs(text.c_str(), stdout);
  }

  if (!all_passed) {
    std::fprintf(stderr, "check failed: %s\n", first_failed->name.c_str());
    return 1;
  }
  return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"verification and solver toolkit for alpha-harmonic maps"};
  std::string config_path, out_path;
  bool reproducible = false, verbose = false;
  app.add_option("--config", config_path, "experiment config (JSON) path");
  app.add_option("--out", out_path, "write the JSON report here (default: stdout)");
  app.add_flag("--reproducible", reproducible,
               "omit timings so identical runs emit identical bytes");
  app.add_flag("--verbose", verbose, "progress and per-check lines on stderr");
  app.fallthrough();

  static const std::vector<std::pair<const char*, const char*>> subs = {
      {"energy", "evaluate the alpha-energy of a map"},
      {"flow", "minimize the alpha-energy by Riemannian gradient descent"},
      {"gradcheck", "finite-difference consistency of the energy gradient"},
      {"conformal-check", "conformal equivalence of alpha-tension and rescaled tension"},
      {"hong-check", "small-density conformal metric construction checks"},
      {"tensor-check", "stress-energy divergence and trace identities"},
      {"fiber-check", "horizontally conformal submersion diagnostics"},
      {"stability", "index matrix assembly and smallest eigenvalue"},
      {"sphere-instability", "frame-summed second variation for sphere targets"},
      {"lemma73", "parallel-frame identities along sphere maps"},
  };
  std::string chosen;
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    std::string captured = name;
    sub->callback([&chosen, captured] { chosen = captured; });
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (config_path.empty()) {
    std::fprintf(stderr, "config error: --config is required\n");
    return 2;
  }
  try {
    return run_config(config_path, chosen, out_path, reproducible, verbose);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

} // namespace cli
} // namespace aharm
