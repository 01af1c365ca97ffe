#ifndef FLUXBAL_CONFIG_HPP_
#define FLUXBAL_CONFIG_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxbal/errors.hpp"
#include "fluxbal/geometry.hpp"
#include "fluxbal/solver.hpp"
#include "fluxbal/systems.hpp"

namespace fluxbal {

using Json = nlohmann::ordered_json;

inline constexpr double kDefaultCfl = 0.45;
inline constexpr double kDefaultTol = 1e-8;

struct OracleSpec {
  State left, right;
  Point normal;
  double offset = 0.0;
};

enum class SourceKind { oracle, solver };
enum class ProfileKind { foliation, face };

struct InitSpec {
  std::string kind = "oracle";  // oracle | constant | sine
  State state;
  double mean = 0.0;
  double amplitude = 1.0;
  Point wavenumber;
};

/// Values along a profile: either a foliation of `domain` or axis faces at positions in [lo, hi].
struct ProfileSpec {
  SourceKind source = SourceKind::oracle;
  ProfileKind profile = ProfileKind::foliation;
  int axis = 0;
  double lo = 0.0, hi = 1.0;
  double t1 = 0.0, t2 = 1.0;
};

struct TraceSpec {
  ProfileSpec where;
  int K = 16;
};

struct BalanceSpec {
  bool enabled = false;
  double t1 = 0.0, t2 = 1.0;
  double tol = kDefaultTol;
};

struct LipschitzSpec {
  bool enabled = false;
  ProfileSpec where;
  std::vector<int> levels{8, 16, 32, 64};
  double growth = 0.05;
  int stable_from = 32;
  std::optional<double> exact;
  double exact_tol = 1e-4;
};

struct ProbeSpec {
  Point x;
  double t = 0.0;
  double min_jump = 0.4;
};

struct TimeContinuitySpec {
  bool enabled = false;
  SourceKind source = SourceKind::oracle;
  double t1 = 0.0;
  double t2_from = 0.05, t2_to = 1.0;
  int count = 20;
  double slack = 1e-6;
  std::optional<ProbeSpec> probe;
};

struct WeakFormSpec {
  bool enabled = false;
  int trials = 10;
  double tol = 1e-6;
  std::optional<Box> box;  // defaults to the domain box
  double t1 = 0.0, t2 = 1.0;
};

struct DiscreteBalanceSpec {
  bool enabled = false;
  int unions = 100;
  int max_union_size = 40;
  double tol = 1e-12;
};

struct VerifySpec {
  BalanceSpec balance;
  LipschitzSpec lipschitz;
  TimeContinuitySpec time_continuity;
  WeakFormSpec weak_form;
  DiscreteBalanceSpec discrete_balance;
};

struct ConvergenceSpec {
  std::vector<int> cells{32, 64, 128, 256};
  std::vector<double> faces;
  int monotone_from = 64;
  std::optional<double> min_field_order;
  std::optional<double> min_flux_order;
};

struct RunConfig {
  std::string model_name;
  int dim = 1;
  double gravity = kStandardGravity;
  Point velocity;
  SystemModel model = SystemModel::burgers(1);
  double tol = kDefaultTol;
  std::uint64_t seed = 0;

  std::optional<OracleSpec> oracle;
  std::optional<Domain> domain;
  double foliation_delta = 0.5;
  double foliation_width = 0.1;
  std::optional<TraceSpec> trace;

  std::optional<Box> mesh_bounds;
  std::vector<int> mesh_cells;
  double cfl = kDefaultCfl;
  std::optional<double> t_end;
  std::vector<double> checkpoints;
  BoundaryKind bc = BoundaryKind::outflow;
  std::optional<InitSpec> init;

  VerifySpec verify;
  std::optional<ConvergenceSpec> convergence;

  Json resolved;  // validated config with every default filled in
};

namespace detail {

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::string choice_error(const std::string& value, const std::vector<std::string>& choices) {
  std::string msg = "unknown value '" + value + "'; expected one of:";
  for (const auto& c : choices) msg += " " + c;
  std::string best;
  std::size_t dist = 3;
  for (const auto& c : choices)
    if (const std::size_t d = edit_distance(value, c); d < dist) {
      dist = d;
      best = c;
    }
  if (!best.empty()) msg += " (did you mean '" + best + "'?)";
  return msg;
}

/// A JSON object being read. Keys that are never read are rejected by `finish`.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  /// Every key asked about counts as known, present or not.
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_->contains(key);
  }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    present_.insert(key);
    if (!has(key)) throw ConfigError(key_path(key), "missing required key");
    return (*j_)[key];
  }

  double number(const std::string& key) { return as_number(at(key), key_path(key)); }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || (*j_)[key].is_null()) {
      present_.insert(key);
      return std::nullopt;
    }
    return number(key);
  }

  long integer(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
    return v.get<long>();
  }
  long integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string choice(const std::string& key, const std::vector<std::string>& choices,
                     std::optional<std::string> fallback = {}) {
    if (!has(key) && fallback) return *fallback;
    const std::string v = text(key);
    if (std::find(choices.begin(), choices.end(), v) == choices.end())
      throw ConfigError(key_path(key), choice_error(v, choices));
    return v;
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array()) throw ConfigError(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], key_path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }
  std::vector<int> integers(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array()) throw ConfigError(key_path(key), "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) throw ConfigError(key_path(key) + "[" + std::to_string(i) + "]", "expected an integer");
      out.push_back(v[i].get<int>());
    }
    return out;
  }

  /// Fixed-length vector stored in a State/Point.
  template <class V>
  V vec(const std::string& key, std::size_t size) {
    const std::vector<double> v = numbers(key);
    if (v.size() != size)
      throw ConfigError(key_path(key), "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
    V out(size);
    for (std::size_t i = 0; i < size; ++i) out[i] = v[i];
    return out;
  }

  std::vector<Interval> intervals(const std::string& key, std::size_t dim) {
    const Json& v = at(key);
    const std::string p = key_path(key);
    if (!v.is_array() || v.size() != dim)
      throw ConfigError(p, "expected " + std::to_string(dim) + " [lo, hi] pairs");
    std::vector<Interval> out;
    for (std::size_t i = 0; i < dim; ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(pi, "expected a [lo, hi] pair");
      const double lo = as_number(v[i][0], pi), hi = as_number(v[i][1], pi);
      if (!(lo < hi)) throw ConfigError(pi, "need lo < hi");
      out.push_back({lo, hi});
    }
    return out;
  }

  const Json& object(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_object()) throw ConfigError(key_path(key), "expected an object");
    return v;
  }

  void finish() const {
    for (const auto& [key, value] : j_->items())
      if (!present_.count(key)) {
        std::vector<std::string> known(seen_.begin(), seen_.end());
        std::string msg = "unknown key";
        std::string best;
        std::size_t dist = 3;
        for (const auto& k : known)
          if (const std::size_t d = edit_distance(key, k); d < dist) {
            dist = d;
            best = k;
          }
        if (!best.empty()) msg += " (did you mean '" + best + "'?)";
        throw ConfigError(key_path(key), msg);
      }
  }

  /// Marks keys as known without reading them (they were read through a child section).
  void accept(const std::vector<std::string>& keys) {
    seen_.insert(keys.begin(), keys.end());
    present_.insert(keys.begin(), keys.end());
  }

 private:
  static double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
  }

  const Json* j_;
  std::string path_;
  std::set<std::string> seen_;     // keys the parser knows about
  std::set<std::string> present_;  // keys actually consumed
};

inline void check_range(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

inline std::optional<Section> child(Section& parent, const std::string& key) {
  if (!parent.has(key)) {
    parent.accept({key});
    return std::nullopt;
  }
  return std::optional<Section>(std::in_place, parent.object(key), parent.key_path(key));
}

inline SourceKind parse_source(Section& s, SourceKind fallback) {
  const std::string v = s.choice("source", {"oracle", "solver"}, fallback == SourceKind::oracle ? "oracle" : "solver");
  return v == "oracle" ? SourceKind::oracle : SourceKind::solver;
}

inline ProfileSpec parse_profile(Section& s, int dim) {
  ProfileSpec p;
  p.source = parse_source(s, SourceKind::oracle);
  p.profile = s.choice("profile", {"foliation", "face"}, "foliation") == "face" ? ProfileKind::face : ProfileKind::foliation;
  p.t1 = s.number("t1", 0.0);
  p.t2 = s.number("t2", 1.0);
  check_range(p.t1 >= 0.0 && p.t1 <= p.t2, s.key_path("t2"), "need 0 <= t1 <= t2");
  if (p.profile == ProfileKind::face) {
    p.axis = static_cast<int>(s.integer("axis", 0));
    check_range(p.axis >= 0 && p.axis < dim, s.key_path("axis"), "axis out of range");
    const std::vector<double> r = s.numbers("range");
    check_range(r.size() == 2 && r[0] < r[1], s.key_path("range"), "expected [lo, hi] with lo < hi");
    p.lo = r[0];
    p.hi = r[1];
  }
  return p;
}

inline Json profile_json(const ProfileSpec& p) {
  Json j;
  j["source"] = p.source == SourceKind::oracle ? "oracle" : "solver";
  j["profile"] = p.profile == ProfileKind::face ? "face" : "foliation";
  j["t1"] = p.t1;
  j["t2"] = p.t2;
  if (p.profile == ProfileKind::face) {
    j["axis"] = p.axis;
    j["range"] = {p.lo, p.hi};
  }
  return j;
}

template <class V>
Json vec_json(const V& v) {
  Json j = Json::array();
  for (double x : v) j.push_back(x);
  return j;
}

inline Json box_json(const Box& b) {
  Json j = Json::array();
  for (int a = 0; a < b.dim(); ++a) j.push_back({b.side(a).lo, b.side(a).hi});
  return j;
}

inline Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json resolve(const RunConfig& c) {
  Json j;
  j["model"] = c.model_name;
  j["dim"] = c.dim;
  if (c.model.kind() == ModelKind::shallow_water) j["gravity"] = c.gravity;
  if (c.model.kind() == ModelKind::advection) j["velocity"] = vec_json(c.velocity);
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  if (c.oracle)
    j["oracle"] = {{"u_l", vec_json(c.oracle->left)}, {"u_r", vec_json(c.oracle->right)},
                   {"normal", vec_json(c.oracle->normal)}, {"offset", c.oracle->offset}};
  if (c.domain) {
    if (const auto* b = std::get_if<Box>(&*c.domain))
      j["domain"] = {{"kind", "box"}, {"bounds", box_json(*b)}};
    else {
      const auto& d = std::get<Disk>(*c.domain);
      j["domain"] = {{"kind", "disk"}, {"center", vec_json(d.center)}, {"radius", d.radius}};
    }
  }
  j["foliation"] = {{"delta", c.foliation_delta}, {"width", c.foliation_width}};
  if (c.trace) {
    Json t = profile_json(c.trace->where);
    t["K"] = c.trace->K;
    j["trace"] = t;
  }
  if (c.mesh_bounds) j["mesh"] = {{"bounds", box_json(*c.mesh_bounds)}, {"cells", c.mesh_cells}};
  j["cfl"] = c.cfl;
  j["t_end"] = opt_json(c.t_end);
  j["checkpoints"] = c.checkpoints;
  j["bc"] = c.bc == BoundaryKind::periodic ? "periodic" : "outflow";
  if (c.init) {
    Json i{{"kind", c.init->kind}};
    if (c.init->kind == "constant") i["state"] = vec_json(c.init->state);
    if (c.init->kind == "sine") {
      i["mean"] = c.init->mean;
      i["amplitude"] = c.init->amplitude;
      i["wavenumber"] = vec_json(c.init->wavenumber);
    }
    j["init"] = i;
  }
  const VerifySpec& v = c.verify;
  Json vj;
  vj["balance"] = {{"enabled", v.balance.enabled}, {"t1", v.balance.t1}, {"t2", v.balance.t2}, {"tol", v.balance.tol}};
  Json lj = profile_json(v.lipschitz.where);
  lj["enabled"] = v.lipschitz.enabled;
  lj["levels"] = v.lipschitz.levels;
  lj["growth"] = v.lipschitz.growth;
  lj["stable_from"] = v.lipschitz.stable_from;
  lj["exact"] = opt_json(v.lipschitz.exact);
  lj["exact_tol"] = v.lipschitz.exact_tol;
  vj["lipschitz"] = lj;
  const auto& tc = v.time_continuity;
  Json tj{{"enabled", tc.enabled}, {"source", tc.source == SourceKind::oracle ? "oracle" : "solver"},
          {"t1", tc.t1}, {"t2_from", tc.t2_from}, {"t2_to", tc.t2_to}, {"count", tc.count}, {"slack", tc.slack}};
  if (tc.probe) tj["probe"] = {{"x", vec_json(tc.probe->x)}, {"t", tc.probe->t}, {"min_jump", tc.probe->min_jump}};
  vj["time_continuity"] = tj;
  Json wj{{"enabled", v.weak_form.enabled}, {"trials", v.weak_form.trials}, {"tol", v.weak_form.tol},
          {"t1", v.weak_form.t1}, {"t2", v.weak_form.t2}};
  if (v.weak_form.box) wj["bounds"] = box_json(*v.weak_form.box);
  vj["weak_form"] = wj;
  vj["discrete_balance"] = {{"enabled", v.discrete_balance.enabled}, {"unions", v.discrete_balance.unions},
                            {"max_union_size", v.discrete_balance.max_union_size}, {"tol", v.discrete_balance.tol}};
  j["verify"] = vj;
  if (c.convergence)
    j["convergence"] = {{"cells", c.convergence->cells}, {"faces", c.convergence->faces},
                        {"monotone_from", c.convergence->monotone_from},
                        {"min_field_order", opt_json(c.convergence->min_field_order)},
                        {"min_flux_order", opt_json(c.convergence->min_flux_order)}};
  return j;
}

}  // namespace detail

/// Validates a parsed document. Unknown keys and bad values raise ConfigError
/// with the dotted key path.
inline RunConfig parse_config_json(const Json& doc) {
  using detail::check_range;
  detail::Section root(doc, "");
  RunConfig c;
  c.model_name = root.choice("model", {"burgers", "advection", "shallow_water"});
  c.dim = static_cast<int>(root.integer("dim", 1));
  check_range(c.dim == 1 || c.dim == 2, "dim", "must be 1 or 2");
  c.gravity = root.number("gravity", kStandardGravity);
  if (c.model_name == "burgers") {
    c.model = SystemModel::burgers(c.dim);
  } else if (c.model_name == "advection") {
    c.velocity = root.vec<Point>("velocity", c.dim);
    c.model = SystemModel::advection(c.velocity);
  } else {
    check_range(c.dim == 1, "dim", "shallow_water is one-dimensional");
    check_range(c.gravity > 0.0, "gravity", "must be > 0");
    c.model = SystemModel::shallow_water(c.gravity);
  }
  const auto D = static_cast<std::size_t>(c.model.components());
  const auto n = static_cast<std::size_t>(c.dim);
  c.tol = root.number("tol", kDefaultTol);
  check_range(c.tol > 0.0, "tol", "must be > 0");
  {
    const long s = root.has("seed") ? root.integer("seed") : 0;
    check_range(s >= 0, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }

  const auto admissible = [&](const State& u, const std::string& path) {
    try {
      c.model.check_admissible(u);
    } catch (const DomainError& e) {
      throw ConfigError(path, e.what());
    }
  };

  if (auto o = detail::child(root, "oracle")) {
    OracleSpec spec;
    spec.left = o->vec<State>("u_l", D);
    spec.right = o->vec<State>("u_r", D);
    admissible(spec.left, o->key_path("u_l"));
    admissible(spec.right, o->key_path("u_r"));
    spec.normal = o->has("normal") ? o->vec<Point>("normal", n) : Point(n, 0.0);
    if (!o->has("normal")) spec.normal[0] = 1.0;
    check_range(std::abs(norm2(spec.normal) - 1.0) <= 1e-12, o->key_path("normal"), "must be a unit vector");
    spec.offset = o->number("offset", 0.0);
    o->finish();
    c.oracle = spec;
  }

  if (auto d = detail::child(root, "domain")) {
    const std::string kind = d->choice("kind", {"box", "disk"}, "box");
    if (kind == "box") {
      c.domain = Domain{Box(d->intervals("bounds", n))};
    } else {
      check_range(c.dim == 2, d->key_path("kind"), "a disk needs dim = 2");
      const Point center = d->vec<Point>("center", 2);
      const double r = d->number("radius");
      check_range(r > 0.0, d->key_path("radius"), "must be > 0");
      c.domain = Domain{Disk(center, r)};
    }
    d->finish();
  }

  if (auto f = detail::child(root, "foliation")) {
    c.foliation_delta = f->number("delta", 0.5);
    c.foliation_width = f->number("width", 0.1);
    check_range(c.foliation_delta > 0.0 && c.foliation_delta < 1.0, f->key_path("delta"), "must lie in (0, 1)");
    check_range(c.foliation_width > 0.0, f->key_path("width"), "must be > 0");
    f->finish();
  }

  if (auto t = detail::child(root, "trace")) {
    TraceSpec spec;
    spec.where = detail::parse_profile(*t, c.dim);
    spec.K = static_cast<int>(t->integer("K", 16));
    check_range(spec.K >= 2, t->key_path("K"), "must be >= 2");
    t->finish();
    c.trace = spec;
  }

  if (auto m = detail::child(root, "mesh")) {
    c.mesh_bounds = Box(m->intervals("bounds", n));
    c.mesh_cells = m->integers("cells");
    check_range(c.mesh_cells.size() == n, m->key_path("cells"), "expected one count per axis");
    for (int k : c.mesh_cells) check_range(k >= 1, m->key_path("cells"), "counts must be >= 1");
    m->finish();
  }
  c.cfl = root.number("cfl", kDefaultCfl);
  check_range(c.cfl > 0.0 && c.cfl < 1.0, "cfl", "must lie in (0, 1), got " + std::to_string(c.cfl));
  if (root.has("t_end")) {
    c.t_end = root.number("t_end");
    check_range(*c.t_end > 0.0, "t_end", "must be > 0");
  }
  if (root.has("checkpoints")) {
    c.checkpoints = root.numbers("checkpoints");
    for (std::size_t k = 0; k < c.checkpoints.size(); ++k)
      check_range(c.checkpoints[k] > 0.0 && (k == 0 || c.checkpoints[k] > c.checkpoints[k - 1]) &&
                      (!c.t_end || c.checkpoints[k] <= *c.t_end),
                  "checkpoints", "must be increasing and lie in (0, t_end]");
  }
  c.bc = root.choice("bc", {"outflow", "periodic"}, "outflow") == "periodic" ? BoundaryKind::periodic
                                                                             : BoundaryKind::outflow;
  if (auto i = detail::child(root, "init")) {
    InitSpec spec;
    spec.kind = i->choice("kind", {"oracle", "constant", "sine"}, "oracle");
    if (spec.kind == "oracle") {
      check_range(c.oracle.has_value(), i->key_path("kind"), "init kind 'oracle' needs an 'oracle' section");
    } else if (spec.kind == "constant") {
      spec.state = i->vec<State>("state", D);
      admissible(spec.state, i->key_path("state"));
    } else {
      check_range(D == 1, i->key_path("kind"), "sine data needs a scalar model");
      spec.mean = i->number("mean", 0.0);
      spec.amplitude = i->number("amplitude", 1.0);
      spec.wavenumber = i->vec<Point>("wavenumber", n);
    }
    i->finish();
    c.init = spec;
  } else if (c.oracle) {
    c.init = InitSpec{};
  }

  if (auto v = detail::child(root, "verify")) {
    VerifySpec& s = c.verify;
    if (auto b = detail::child(*v, "balance")) {
      s.balance.enabled = b->boolean("enabled", true);
      s.balance.t1 = b->number("t1", 0.0);
      s.balance.t2 = b->number("t2", 1.0);
      check_range(s.balance.t1 >= 0.0 && s.balance.t1 <= s.balance.t2, b->key_path("t2"), "need 0 <= t1 <= t2");
      s.balance.tol = b->number("tol", c.tol);
      check_range(s.balance.tol > 0.0, b->key_path("tol"), "must be > 0");
      b->finish();
    }
    if (auto l = detail::child(*v, "lipschitz")) {
      LipschitzSpec& L = s.lipschitz;
      L.enabled = l->boolean("enabled", true);
      L.where = detail::parse_profile(*l, c.dim);
      if (l->has("levels")) L.levels = l->integers("levels");
      check_range(!L.levels.empty(), l->key_path("levels"), "must not be empty");
      for (std::size_t k = 0; k < L.levels.size(); ++k)
        check_range(L.levels[k] >= 2 && (k == 0 || L.levels[k] > L.levels[k - 1]), l->key_path("levels"),
                    "must be increasing integers >= 2");
      L.growth = l->number("growth", 0.05);
      L.stable_from = static_cast<int>(l->integer("stable_from", 32));
      L.exact = l->optional_number("exact");
      L.exact_tol = l->number("exact_tol", 1e-4);
      l->finish();
    }
    if (auto t = detail::child(*v, "time_continuity")) {
      TimeContinuitySpec& T = s.time_continuity;
      T.enabled = t->boolean("enabled", true);
      T.source = detail::parse_source(*t, SourceKind::oracle);
      T.t1 = t->number("t1", 0.0);
      T.t2_from = t->number("t2_from", 0.05);
      T.t2_to = t->number("t2_to", 1.0);
      T.count = static_cast<int>(t->integer("count", 20));
      check_range(T.count >= 1, t->key_path("count"), "must be >= 1");
      check_range(T.t1 >= 0.0 && T.t1 <= T.t2_from && T.t2_from < T.t2_to, t->key_path("t2_to"),
                  "need 0 <= t1 <= t2_from < t2_to");
      T.slack = t->number("slack", 1e-6);
      if (auto p = detail::child(*t, "probe")) {
        ProbeSpec ps;
        ps.x = p->vec<Point>("x", n);
        ps.t = p->number("t");
        ps.min_jump = p->number("min_jump", 0.4);
        p->finish();
        T.probe = ps;
      }
      t->finish();
    }
    if (auto w = detail::child(*v, "weak_form")) {
      WeakFormSpec& W = s.weak_form;
      W.enabled = w->boolean("enabled", true);
      W.trials = static_cast<int>(w->integer("trials", 10));
      check_range(W.trials >= 1, w->key_path("trials"), "must be >= 1");
      W.tol = w->number("tol", 1e-6);
      if (w->has("bounds")) W.box = Box(w->intervals("bounds", n));
      W.t1 = w->number("t1", 0.0);
      W.t2 = w->number("t2", 1.0);
      check_range(W.t1 >= 0.0 && W.t1 < W.t2, w->key_path("t2"), "need 0 <= t1 < t2");
      w->finish();
    }
    if (auto d = detail::child(*v, "discrete_balance")) {
      DiscreteBalanceSpec& B = s.discrete_balance;
      B.enabled = d->boolean("enabled", true);
      B.unions = static_cast<int>(d->integer("unions", 100));
      B.max_union_size = static_cast<int>(d->integer("max_union_size", 40));
      check_range(B.unions >= 1 && B.max_union_size >= 1, d->key_path("unions"), "counts must be >= 1");
      B.tol = d->number("tol", 1e-12);
      d->finish();
    }
    v->finish();
  }

  if (auto cv = detail::child(root, "convergence")) {
    ConvergenceSpec spec;
    if (cv->has("cells")) spec.cells = cv->integers("cells");
    for (std::size_t k = 0; k < spec.cells.size(); ++k)
      check_range(spec.cells[k] >= 1 && (k == 0 || spec.cells[k] > spec.cells[k - 1]), cv->key_path("cells"),
                  "must be increasing positive integers");
    spec.faces = cv->numbers("faces");
    spec.monotone_from = static_cast<int>(cv->integer("monotone_from", 64));
    spec.min_field_order = cv->optional_number("min_field_order");
    spec.min_flux_order = cv->optional_number("min_flux_order");
    cv->finish();
    c.convergence = spec;
  }
  root.finish();
  c.resolved = detail::resolve(c);
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", "malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config_json(doc);
}

/// FNV-1a 64 of the canonical resolved config, as 16 hex digits.
inline std::string config_digest(const Json& resolved) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : resolved.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Solver setup from the config; `solve`, `convergence` and solver-sourced checks need it.
inline SolverConfig solver_config(const RunConfig& c) {
  if (!c.mesh_bounds) throw ConfigError("mesh", "missing required key (needed by the solver)");
  if (!c.t_end) throw ConfigError("t_end", "missing required key (needed by the solver)");
  if (!c.init) throw ConfigError("init", "missing required key (needed by the solver)");
  SolverConfig s;
  s.model = c.model;
  s.mesh = Mesh(*c.mesh_bounds, c.mesh_cells);
  s.cfl = c.cfl;
  s.t_end = *c.t_end;
  s.bc = c.bc;
  if (c.init->kind == "oracle")
    s.init = RiemannInit{c.oracle->left, c.oracle->right, c.oracle->normal, c.oracle->offset, 0.0};
  else if (c.init->kind == "constant")
    s.init = ConstantInit{c.init->state};
  else
    s.init = SineInit{c.init->mean, c.init->amplitude, c.init->wavenumber};
  try {
    s.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError("", e.what());
  }
  return s;
}

}  // namespace fluxbal

#endif  // FLUXBAL_CONFIG_HPP_
