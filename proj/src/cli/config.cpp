#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bmd/config.hpp"
#include "bmd/errors.hpp"
#include "bmd/quadratic_game.hpp"
#include "bmd/rng.hpp"
#include "bmd/thermal_game.hpp"

namespace bmd {
namespace {

using json = nlohmann::json;

// A JSON value together with its key path, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_ + ": " + msg); }

  void require_object(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, _] : j_.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) fail("unknown key '" + key + "'");
    }
  }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  Node at(const std::string& key) const {
    if (!has(key)) fail("missing key '" + key + "'");
    return {j_.at(key), path_ + "." + key};
  }
  Node at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }
  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (j_.is_number()) return j_.get<double>();
    // JSON has no infinity literal; accept the strings for open bounds.
    if (j_.is_string()) {
      const auto& s = j_.get_ref<const std::string&>();
      if (s == "inf" || s == "+inf") return INFINITY;
      if (s == "-inf") return -INFINITY;
    }
    fail("expected a number");
  }
  double finite() const {
    const double v = number();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }
  std::uint64_t unsigned_integer() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0))
      fail("expected a nonnegative integer");
    return j_.get<std::uint64_t>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  Vector vector() const {
    Vector v(size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(i).number();
    return v;
  }
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> v(size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::size_t>(at(i).unsigned_integer());
    return v;
  }

 private:
  const json& j_;
  std::string path_;
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

InteriorBall parse_ball(const Node& n) {
  n.require_object({"center", "radius"});
  return {n.at("center").vector(), n.at("radius").finite()};
}

std::vector<InteriorBall> parse_balls(const Node& n) {
  std::vector<InteriorBall> balls;
  for (std::size_t i = 0; i < n.size(); ++i) balls.push_back(parse_ball(n.at(i)));
  return balls;
}

FeasibleSet parse_set(const Node& n) {
  n.require_object({"lower", "upper", "halfspaces"});
  std::vector<Halfspace> hs;
  if (n.has("halfspaces")) {
    const Node rows = n.at("halfspaces");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Node h = rows.at(r);
      h.require_object({"normal", "offset"});
      hs.push_back({h.at("normal").vector(), h.at("offset").finite()});
    }
  }
  try {
    return FeasibleSet(n.at("lower").vector(), n.at("upper").vector(), std::move(hs));
  } catch (const ConfigError& e) {
    n.fail(e.what());
  }
}

std::shared_ptr<const Game> parse_quadratic(const Node& g) {
  g.require_object({"kind", "dims", "matrix", "linear", "sets", "balls"});
  QuadraticGameSpec spec;
  spec.dims = g.at("dims").indices();
  std::size_t n = 0;
  for (auto d : spec.dims) n += d;
  const Node m = g.at("matrix");
  if (m.size() != n) m.fail("expected " + std::to_string(n) + " rows");
  for (std::size_t r = 0; r < n; ++r) {
    Vector row = m.at(r).vector();
    if (row.size() != n) m.at(r).fail("expected " + std::to_string(n) + " entries");
    spec.matrix.insert(spec.matrix.end(), row.begin(), row.end());
  }
  spec.linear = g.at("linear").vector();
  const Node sets = g.at("sets");
  for (std::size_t i = 0; i < sets.size(); ++i) spec.sets.push_back(parse_set(sets.at(i)));
  if (g.has("balls")) spec.balls = parse_balls(g.at("balls"));
  return std::make_shared<QuadraticGame>(std::move(spec));
}

BuildingParams parse_building(const Node& n, BuildingParams p) {
  n.require_object({"a", "b", "c", "r0", "power_cap", "comfort_lo", "comfort_hi"});
  if (n.has("a")) p.a = n.at("a").finite();
  if (n.has("b")) p.b = n.at("b").finite();
  if (n.has("c")) p.c = n.at("c").finite();
  if (n.has("r0")) p.r0 = n.at("r0").finite();
  if (n.has("power_cap")) p.power_cap = n.at("power_cap").finite();
  if (n.has("comfort_lo")) p.comfort_lo = n.at("comfort_lo").vector();
  if (n.has("comfort_hi")) p.comfort_hi = n.at("comfort_hi").vector();
  return p;
}

std::shared_ptr<const Game> parse_thermal(const Node& g) {
  g.require_object({"kind", "buildings", "slots", "price_energy", "price_peak", "smoothing", "lambda",
                    "cliques", "building", "balls"});
  ThermalGameSpec spec = default_thermal_spec();
  if (g.has("buildings")) spec.buildings = static_cast<std::size_t>(g.at("buildings").unsigned_integer());
  if (g.has("slots")) spec.slots = static_cast<std::size_t>(g.at("slots").unsigned_integer());
  if (g.has("price_energy")) spec.price_energy = g.at("price_energy").vector();
  if (g.has("price_peak")) spec.price_peak = g.at("price_peak").finite();
  if (g.has("smoothing")) spec.smoothing = g.at("smoothing").finite();
  if (g.has("cliques")) {
    const Node c = g.at("cliques");
    spec.cliques.clear();
    for (std::size_t j = 0; j < c.size(); ++j) spec.cliques.push_back(c.at(j).indices());
  }

  // lambda: an explicit per-building table, or {seed, low, high} for
  // uniform draws.
  std::uint64_t lambda_seed = 7;
  double lo = 0.04, hi = 0.06;
  bool explicit_lambda = false;
  if (g.has("lambda")) {
    const Node l = g.at("lambda");
    if (l.raw().is_array()) {
      spec.lambda.clear();
      for (std::size_t i = 0; i < l.size(); ++i) spec.lambda.push_back(l.at(i).vector());
      explicit_lambda = true;
    } else {
      l.require_object({"seed", "low", "high"});
      if (l.has("seed")) lambda_seed = l.at("seed").unsigned_integer();
      if (l.has("low")) lo = l.at("low").finite();
      if (l.has("high")) hi = l.at("high").finite();
      if (!(lo <= hi)) l.fail("low must not exceed high");
    }
  }
  if (!explicit_lambda) {
    RandomStream rng(lambda_seed, "lambda", 0);
    spec.lambda.assign(spec.buildings, Vector(spec.slots));
    for (auto& row : spec.lambda)
      for (double& v : row) v = rng.uniform(lo, hi);
  }

  BuildingParams base;
  base.comfort_lo.assign(spec.slots, 1.0);
  base.comfort_hi.assign(spec.slots, 5.0);
  spec.building.assign(spec.buildings, base);
  if (g.has("building")) {
    const Node b = g.at("building");
    if (b.raw().is_array()) {
      spec.building.clear();
      for (std::size_t i = 0; i < b.size(); ++i) spec.building.push_back(parse_building(b.at(i), base));
    } else {
      spec.building.assign(spec.buildings, parse_building(b, base));
    }
  }
  if (g.has("balls")) spec.balls = parse_balls(g.at("balls"));
  try {
    return std::make_shared<ThermalGame>(std::move(spec));
  } catch (const ConfigError& e) {
    g.fail(e.what());
  }
}

DelayModel parse_delays(const Node& n, DelayModel d) {
  n.require_object({"kind", "mode", "c", "alpha_d", "d_bar"});
  if (n.has("kind")) {
    const auto k = n.at("kind").string();
    if (k == "heterogeneous") d.kind = DelayKind::HeterogeneousBounded;
    else if (k == "homogeneous") d.kind = DelayKind::HomogeneousSublinear;
    else n.at("kind").fail("expected 'heterogeneous' or 'homogeneous'");
  }
  if (n.has("mode")) {
    const auto m = n.at("mode").string();
    if (m == "uniform") d.mode = DelayMode::UniformRandom;
    else if (m == "deterministic") d.mode = DelayMode::Deterministic;
    else n.at("mode").fail("expected 'uniform' or 'deterministic'");
  }
  if (n.has("c")) d.c = n.at("c").finite();
  if (n.has("alpha_d")) d.alpha_d = n.at("alpha_d").finite();
  if (n.has("d_bar")) d.d_bar = n.at("d_bar").finite();
  try {
    d.validate();
  } catch (const ConfigError& e) {
    n.fail(e.what());
  }
  return d;
}

ScheduleParams parse_schedules(const Node& n, ScheduleParams s) {
  n.require_object({"gamma0", "k_gamma", "alpha_gamma", "delta0", "k_delta", "alpha_delta"});
  if (n.has("gamma0")) s.gamma0 = n.at("gamma0").finite();
  if (n.has("k_gamma")) s.k_gamma = n.at("k_gamma").finite();
  if (n.has("alpha_gamma")) s.alpha_gamma = n.at("alpha_gamma").finite();
  if (n.has("delta0")) s.delta0 = n.at("delta0").finite();
  if (n.has("k_delta")) s.k_delta = n.at("k_delta").finite();
  if (n.has("alpha_delta")) s.alpha_delta = n.at("alpha_delta").finite();
  return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ExperimentConfig parse_document(const json& doc, const std::filesystem::path& base_dir, bool top_level) {
  const Node root(doc, "$");
  if (top_level) {
    root.require_object({"schema_version", "game", "delays", "schedules", "run", "output", "oracle", "scenarios"});
    const auto v = root.at("schema_version").integer();
    if (v != kSchemaVersion)
      root.at("schema_version").fail("unsupported schema version " + std::to_string(v) + " (expected " +
                                     std::to_string(kSchemaVersion) + ")");
  }

  ExperimentConfig cfg;
  const Node game = root.at("game");
  cfg.game_kind = game.at("kind").string();
  if (cfg.game_kind == "quadratic") cfg.game = parse_quadratic(game);
  else if (cfg.game_kind == "thermal") cfg.game = parse_thermal(game);
  else game.at("kind").fail("expected 'quadratic' or 'thermal'");

  if (root.has("delays")) cfg.delay = parse_delays(root.at("delays"), cfg.delay);
  if (root.has("schedules")) cfg.schedule = parse_schedules(root.at("schedules"), cfg.schedule);
  cfg.schedule.alpha_d = cfg.delay.alpha_d;

  if (root.has("run")) {
    const Node r = root.at("run");
    r.require_object({"horizon", "seed", "replications", "stride", "estimator", "threads", "mirror", "initial"});
    if (r.has("horizon")) cfg.horizon = r.at("horizon").integer();
    if (r.has("seed")) cfg.seed = r.at("seed").unsigned_integer();
    if (r.has("replications")) cfg.replications = static_cast<int>(r.at("replications").integer());
    if (r.has("stride")) cfg.stride = r.at("stride").integer();
    if (r.has("threads")) cfg.threads = static_cast<unsigned>(r.at("threads").unsigned_integer());
    if (r.has("estimator")) {
      try {
        cfg.estimator = parse_estimator(r.at("estimator").string());
      } catch (const ConfigError& e) {
        r.at("estimator").fail(e.what());
      }
    }
    if (r.has("mirror")) {
      const auto m = r.at("mirror").string();
      if (m == "euclidean") cfg.mirror = MirrorStructure::euclidean();
      else if (m == "entropic") cfg.mirror = MirrorStructure::entropic();
      else r.at("mirror").fail("expected 'euclidean' or 'entropic'");
    }
    if (r.has("initial")) cfg.initial = r.at("initial").vector();
  }
  if (root.has("output")) {
    const Node o = root.at("output");
    o.require_object({"trace", "oracle"});
    if (o.has("trace")) cfg.trace_path = resolve(base_dir, o.at("trace").string());
    if (o.has("oracle")) cfg.oracle_path = resolve(base_dir, o.at("oracle").string());
  }
  if (root.has("oracle")) {
    const Node o = root.at("oracle");
    o.require_object({"tol", "max_iter"});
    if (o.has("tol")) cfg.oracle_tol = o.at("tol").finite();
    if (o.has("max_iter")) cfg.oracle_max_iter = static_cast<int>(o.at("max_iter").integer());
  }

  if (top_level && root.has("scenarios")) {
    cfg.has_scenarios = true;
    const Node list = root.at("scenarios");
    std::set<std::string> names;
    for (std::size_t s = 0; s < list.size(); ++s) {
      const Node sc = list.at(s);
      sc.require_object({"name", "game", "delays", "schedules", "run"});
      const std::string name = sc.at("name").string();
      if (name.empty() || name.find_first_of("/\\") != std::string::npos || name == "." || name == "..")
        sc.at("name").fail("scenario names must be nonempty and usable as file names");
      if (!names.insert(name).second) sc.at("name").fail("duplicate scenario name '" + name + "'");
      json merged = doc;
      merged.erase("scenarios");
      json patch = sc.raw();
      patch.erase("name");
      merged.merge_patch(patch);
      ExperimentConfig child;
      try {
        child = parse_document(merged, base_dir, false);
      } catch (const ConfigError& e) {
        throw ConfigError("scenario '" + name + "': " + e.what());
      }
      child.name = name;
      cfg.scenarios.push_back(std::move(child));
    }
  }
  return cfg;
}

}  // namespace

RunConfig ExperimentConfig::run_config() const {
  RunConfig r;
  r.game = game.get();
  r.delay = delay;
  r.schedule = schedule;
  r.horizon = horizon;
  r.seed = seed;
  r.replications = replications;
  r.stride = stride;
  r.estimator = estimator;
  r.mirror = mirror;
  r.initial = initial;
  return r;
}

std::string_view estimator_name(EstimatorKind k) {
  return k == EstimatorKind::Residual ? "residual" : "single_point";
}

EstimatorKind parse_estimator(std::string_view s) {
  if (s == "residual") return EstimatorKind::Residual;
  if (s == "single_point") return EstimatorKind::SinglePoint;
  throw ConfigError("unknown estimator '" + std::string(s) + "' (expected 'residual' or 'single_point')");
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    const auto cut = msg.find("syntax error");
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      (cut == std::string::npos ? msg : msg.substr(cut)));
  }
  try {
    return parse_document(doc, base_dir, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

}  // namespace bmd
