#include "brvlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "brvlab/error.hpp"
#include "json.hpp"

namespace brvlab {

namespace {

using nlohmann::json;

const std::set<std::string> kUnboundedWeightKinds{"pareto", "exponential", "lognormal", "gamma",
                                                  "weibull", "student"};

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) throw ConfigError(where + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: cannot read '{}'", where, node.Scalar()));
  }
}

double finite(const YAML::Node& node, const std::string& where) {
  const double v = scalar<double>(node, where);
  if (!std::isfinite(v)) throw ConfigError(where + " must be finite");
  return v;
}

std::size_t count(const YAML::Node& node, const std::string& where) {
  const double v = finite(node, where);
  if (v < 0.0 || v != std::floor(v) || v > 1e15) {
    throw ConfigError(where + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

template <class E>
E pick(const std::string& text, const std::string& where,
       std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, value] : options) {
    if (text == name) return value;
  }
  std::string names;
  for (const auto& o : options) names += fmt::format("{}{}", names.empty() ? "" : ", ", o.first);
  throw ConfigError(fmt::format("{}: '{}' is not one of {}", where, text, names));
}

WeightSpec parse_weight(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  WeightSpec w;
  if (!node["kind"]) throw ConfigError(where + ".kind is required");
  w.kind = scalar<std::string>(node["kind"], where + ".kind");
  if (kUnboundedWeightKinds.contains(w.kind)) {
    throw AssumptionViolation(fmt::format(
        "{}: weight law '{}' has unbounded support; the tail conditions on sums are only "
        "verified for weights with bounded-above support",
        where, w.kind));
  }
  if (w.kind == "uniform") {
    check_keys(node, where, {"kind", "lo", "hi"});
    if (!node["lo"] || !node["hi"]) throw ConfigError(where + ": uniform needs lo and hi");
    w.lo = finite(node["lo"], where + ".lo");
    w.hi = finite(node["hi"], where + ".hi");
  } else if (w.kind == "constant") {
    check_keys(node, where, {"kind", "value"});
    if (!node["value"]) throw ConfigError(where + ": constant needs value");
    w.value = finite(node["value"], where + ".value");
  } else if (w.kind == "discrete") {
    check_keys(node, where, {"kind", "atoms"});
    const auto atoms = node["atoms"];
    if (!atoms || !atoms.IsSequence() || atoms.size() == 0) {
      throw ConfigError(where + ".atoms must be a non-empty list of [value, prob]");
    }
    for (const auto& a : atoms) {
      if (!a.IsSequence() || a.size() != 2) throw ConfigError(where + ".atoms entries are [value, prob]");
      w.atoms.push_back({finite(a[0], where + ".atoms"), finite(a[1], where + ".atoms")});
    }
  } else {
    throw ConfigError(fmt::format("{}.kind: unknown weight kind '{}'", where, w.kind));
  }
  w.build();  // surface parameter errors at load time
  return w;
}

void apply_family(FamilySpec& f, const YAML::Node& node, const std::string& where, bool base) {
  if (base) {
    check_keys(node, where,
               {"variant", "marginal_x", "marginal_y", "theta", "delta", "coupling", "tail_weight",
                "a1", "a2", "mixing"});
  } else {
    check_keys(node, where, {"theta", "delta", "coupling", "tail_weight", "a1", "a2", "mixing"});
  }
  if (node["variant"]) {
    f.variant = pick<Variant>(scalar<std::string>(node["variant"], where + ".variant"),
                              where + ".variant",
                              {{"A", Variant::independence},
                               {"B", Variant::marginal_tilt},
                               {"C", Variant::joint_mixture}});
  }
  for (const char* side : {"marginal_x", "marginal_y"}) {
    const auto m = node[side];
    if (!m) continue;
    const std::string w = where + "." + side;
    check_keys(m, w, {"alpha", "sigma"});
    const double alpha = m["alpha"] ? finite(m["alpha"], w + ".alpha") : 2.0;
    const double sigma = m["sigma"] ? finite(m["sigma"], w + ".sigma") : 1.0;
    if (std::string(side) == "marginal_x") {
      f.alpha = alpha;
      f.sigma_x = sigma;
    } else {
      f.beta = alpha;
      f.sigma_y = sigma;
    }
  }
  if (node["theta"]) f.theta = parse_weight(node["theta"], where + ".theta");
  if (node["delta"]) f.delta = parse_weight(node["delta"], where + ".delta");
  if (node["coupling"]) {
    f.coupling = pick<WeightCoupling>(scalar<std::string>(node["coupling"], where + ".coupling"),
                                      where + ".coupling",
                                      {{"independent", WeightCoupling::independent},
                                       {"comonotone", WeightCoupling::comonotone}});
  }
  if (node["tail_weight"]) f.tail_weight = finite(node["tail_weight"], where + ".tail_weight");
  if (node["a1"]) f.a1 = finite(node["a1"], where + ".a1");
  if (node["a2"]) f.a2 = finite(node["a2"], where + ".a2");
  if (const auto m = node["mixing"]) {
    const std::string w = where + ".mixing";
    check_keys(m, w, {"base", "theta_slope", "delta_slope"});
    if (m["base"]) f.mixing.base = finite(m["base"], w + ".base");
    if (m["theta_slope"]) f.mixing.theta_slope = finite(m["theta_slope"], w + ".theta_slope");
    if (m["delta_slope"]) f.mixing.delta_slope = finite(m["delta_slope"], w + ".delta_slope");
  }
}

json weight_json(const WeightSpec& w) {
  json j{{"kind", w.kind}};
  if (w.kind == "uniform") {
    j["lo"] = w.lo;
    j["hi"] = w.hi;
  } else if (w.kind == "constant") {
    j["value"] = w.value;
  } else {
    json atoms = json::array();
    for (const auto& a : w.atoms) atoms.push_back({a.value, a.prob});
    j["atoms"] = atoms;
  }
  return j;
}

json family_json(const FamilySpec& f) {
  return json{
      {"variant", to_string(f.variant)},
      {"marginal_x", {{"alpha", f.alpha}, {"sigma", f.sigma_x}}},
      {"marginal_y", {{"alpha", f.beta}, {"sigma", f.sigma_y}}},
      {"theta", weight_json(f.theta)},
      {"delta", weight_json(f.delta)},
      {"coupling", f.coupling == WeightCoupling::independent ? "independent" : "comonotone"},
      {"tail_weight", f.tail_weight},
      {"a1", f.a1},
      {"a2", f.a2},
      {"mixing",
       {{"base", f.mixing.base},
        {"theta_slope", f.mixing.theta_slope},
        {"delta_slope", f.mixing.delta_slope}}},
  };
}

}  // namespace

const char* to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::breiman:
      return "breiman";
    case ExperimentKind::product_corner:
      return "product-corner";
    case ExperimentKind::sum_measure:
      return "sum-measure";
    case ExperimentKind::stopped_sum:
      return "stopped-sum";
    case ExperimentKind::ruin:
      return "ruin";
    case ExperimentKind::jes:
      return "jes";
    case ExperimentKind::cr:
      return "cr";
    case ExperimentKind::verify_assumptions:
      return "verify-assumptions";
  }
  return "?";
}

const char* to_string(Functional f) noexcept {
  switch (f) {
    case Functional::first:
      return "first";
    case Functional::second:
      return "second";
    case Functional::corner:
      return "corner";
    case Functional::box:
      return "box";
  }
  return "?";
}

WeightLaw WeightSpec::build() const {
  if (kind == "uniform") return WeightLaw::uniform(lo, hi);
  if (kind == "constant") return WeightLaw::constant(value);
  return WeightLaw::discrete(atoms);
}

DependenceFamily FamilySpec::build() const {
  const RvMarginal x(alpha, sigma_x);
  const RvMarginal y(beta, sigma_y);
  WeightPair w(theta.build(), delta.build(), coupling);
  switch (variant) {
    case Variant::independence:
      return DependenceFamily::independence(x, y, std::move(w), tail_weight);
    case Variant::marginal_tilt:
      return DependenceFamily::marginal_tilt(x, y, std::move(w), a1, a2);
    case Variant::joint_mixture:
      return DependenceFamily::joint_mixture(x, y, std::move(w), mixing);
  }
  throw ConfigError("unknown variant");
}

FamilySequence ExperimentConfig::sequence() const {
  if (per_index.empty()) return FamilySequence::iid(family.build(), horizon);
  std::vector<DependenceFamily> fams;
  fams.reserve(per_index.size());
  for (const auto& f : per_index) fams.push_back(f.build());
  return FamilySequence(std::move(fams));
}

StoppingLaw ExperimentConfig::stopping_law() const {
  if (stopping.empty()) throw ConfigError("stopping law is required for this experiment");
  return StoppingLaw(stopping);
}

std::uint64_t parse_seed(const std::string& text) {
  std::string s = text;
  if (s.starts_with("0x") || s.starts_with("0X")) s = s.substr(2);
  if (s.empty() || s.size() > 16 || !std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isxdigit(c) != 0;
      })) {
    throw ConfigError(fmt::format("seed '{}' is not a 64-bit hexadecimal value", text));
  }
  return std::stoull(s, nullptr, 16);
}

std::string format_seed(std::uint64_t seed) { return fmt::format("0x{:016x}", seed); }

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
  }
  check_keys(root, "config",
             {"schema_version", "experiment", "seed", "output", "workers", "budget", "x_grid", "p",
              "q", "horizon", "epsilon", "estimator", "functional", "family", "per_index",
              "stopping", "ruin", "tolerance"});
  ExperimentConfig c;
  if (!root["schema_version"]) throw ConfigError("schema_version is required");
  c.schema_version = static_cast<int>(count(root["schema_version"], "schema_version"));
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version {} (expected {})", c.schema_version,
                                  kSchemaVersion));
  }
  if (!root["experiment"]) throw ConfigError("experiment is required");
  c.kind = pick<ExperimentKind>(scalar<std::string>(root["experiment"], "experiment"), "experiment",
                                {{"breiman", ExperimentKind::breiman},
                                 {"product-corner", ExperimentKind::product_corner},
                                 {"sum-measure", ExperimentKind::sum_measure},
                                 {"stopped-sum", ExperimentKind::stopped_sum},
                                 {"ruin", ExperimentKind::ruin},
                                 {"jes", ExperimentKind::jes},
                                 {"cr", ExperimentKind::cr},
                                 {"verify-assumptions", ExperimentKind::verify_assumptions}});
  if (root["seed"]) c.seed = parse_seed(scalar<std::string>(root["seed"], "seed"));
  if (root["output"]) c.output = scalar<std::string>(root["output"], "output");
  if (root["workers"]) c.workers = std::max<std::size_t>(1, count(root["workers"], "workers"));
  if (root["budget"]) c.budget = count(root["budget"], "budget");
  if (c.budget < 1000) throw ConfigError("budget must be >= 1000");
  if (const auto g = root["x_grid"]) {
    if (!g.IsSequence() || g.size() == 0) throw ConfigError("x_grid must be a non-empty list");
    c.x_grid.clear();
    for (const auto& v : g) c.x_grid.push_back(finite(v, "x_grid"));
  }
  for (double x : c.x_grid) {
    if (!(x >= 1.0)) throw ConfigError("x_grid values must be >= 1");
  }
  if (root["p"]) c.p = finite(root["p"], "p");
  if (root["q"]) c.q = finite(root["q"], "q");
  if (!(c.p > 0.0) || !(c.q > 0.0)) throw ConfigError("p and q must be > 0");
  if (root["horizon"]) c.horizon = count(root["horizon"], "horizon");
  if (c.horizon == 0) throw ConfigError("horizon must be >= 1");
  if (root["epsilon"]) c.epsilon = finite(root["epsilon"], "epsilon");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (root["estimator"]) {
    c.estimator = pick<EstimatorKind>(scalar<std::string>(root["estimator"], "estimator"),
                                      "estimator",
                                      {{"conditional", EstimatorKind::conditional},
                                       {"plain", EstimatorKind::plain}});
  }
  if (root["functional"]) {
    c.functional = pick<Functional>(scalar<std::string>(root["functional"], "functional"),
                                    "functional",
                                    {{"first", Functional::first},
                                     {"second", Functional::second},
                                     {"corner", Functional::corner},
                                     {"box", Functional::box}});
  }
  if (!root["family"]) throw ConfigError("family is required");
  apply_family(c.family, root["family"], "family", true);
  if (const auto pi = root["per_index"]) {
    if (!pi.IsSequence()) throw ConfigError("per_index must be a list");
    if (pi.size() != c.horizon) throw ConfigError("per_index length must equal horizon");
    for (std::size_t i = 0; i < pi.size(); ++i) {
      FamilySpec f = c.family;
      apply_family(f, pi[i], fmt::format("per_index[{}]", i), false);
      c.per_index.push_back(f);
    }
  }
  if (const auto s = root["stopping"]) {
    check_keys(s, "stopping", {"kind", "lo", "hi", "atoms"});
    const std::string kind = s["kind"] ? scalar<std::string>(s["kind"], "stopping.kind") : "discrete";
    if (kind == "uniform") {
      if (!s["lo"] || !s["hi"]) throw ConfigError("stopping: uniform needs lo and hi");
      const auto lo = count(s["lo"], "stopping.lo");
      const auto hi = count(s["hi"], "stopping.hi");
      if (lo > hi) throw ConfigError("stopping: lo must be <= hi");
      c.stopping = StoppingLaw::uniform(lo, hi).atoms();
    } else if (kind == "discrete") {
      if (!s["atoms"] || !s["atoms"].IsSequence()) throw ConfigError("stopping.atoms must be a list");
      for (const auto& a : s["atoms"]) {
        if (!a.IsSequence() || a.size() != 2) throw ConfigError("stopping.atoms entries are [n, prob]");
        c.stopping.push_back({count(a[0], "stopping.atoms"), finite(a[1], "stopping.atoms")});
      }
    } else if (kind == "poisson" || kind == "geometric" || kind == "negative-binomial") {
      throw AssumptionViolation(fmt::format(
          "stopping law '{}' is unbounded; the stopped-sum limit needs N bounded above", kind));
    } else {
      throw ConfigError(fmt::format("stopping.kind: unknown kind '{}'", kind));
    }
    StoppingLaw(c.stopping);
  }
  if (const auto r = root["ruin"]) {
    check_keys(r, "ruin", {"kind", "functional", "weights", "premium_x", "premium_y"});
    if (r["kind"]) {
      c.ruin.kind = scalar<std::string>(r["kind"], "ruin.kind");
      pick<int>(c.ruin.kind, "ruin.kind", {{"and", 0}, {"sim", 1}, {"or", 2}});
    }
    if (r["functional"]) {
      c.ruin.functional = scalar<std::string>(r["functional"], "ruin.functional");
      pick<int>(c.ruin.functional, "ruin.functional", {{"psi", 0}, {"positive-part-gap", 1}});
    }
    if (r["weights"]) {
      c.ruin.weights = scalar<std::string>(r["weights"], "ruin.weights");
      pick<int>(c.ruin.weights, "ruin.weights", {{"per-index", 0}, {"product", 1}});
      if (c.ruin.weights == "product") {
        throw AssumptionViolation(
            "ruin.weights: product-form discount weights make the weights of different periods "
            "dependent, which breaks the cross-index independence the sum limits rely on; "
            "parameterize each period's weight law under per_index instead");
      }
    }
    if (r["premium_x"]) c.ruin.premium_x = finite(r["premium_x"], "ruin.premium_x");
    if (r["premium_y"]) c.ruin.premium_y = finite(r["premium_y"], "ruin.premium_y");
    if (c.ruin.premium_x < 0.0 || c.ruin.premium_y < 0.0) {
      throw ConfigError("ruin premiums must be >= 0");
    }
  }
  if (const auto t = root["tolerance"]) {
    check_keys(t, "tolerance", {"relative", "stderr_multiple", "rows"});
    c.tolerance.relative.reset();
    if (t["relative"]) c.tolerance.relative = finite(t["relative"], "tolerance.relative");
    if (t["stderr_multiple"]) {
      c.tolerance.stderr_multiple = finite(t["stderr_multiple"], "tolerance.stderr_multiple");
    }
    if (t["rows"]) {
      c.tolerance.rows = scalar<std::string>(t["rows"], "tolerance.rows");
      pick<int>(c.tolerance.rows, "tolerance.rows", {{"last", 0}, {"all", 1}});
    }
  }
  // Build once so parameter errors surface before any computation.
  (void)c.sequence();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["experiment"] = to_string(c.kind);
  j["seed"] = format_seed(c.seed);
  j["budget"] = c.budget;
  j["x_grid"] = c.x_grid;
  j["p"] = c.p;
  j["q"] = c.q;
  j["horizon"] = c.horizon;
  j["epsilon"] = c.epsilon;
  j["estimator"] = c.estimator == EstimatorKind::plain ? "plain" : "conditional";
  j["functional"] = to_string(c.functional);
  j["family"] = family_json(c.family);
  if (!c.per_index.empty()) {
    json pi = json::array();
    for (const auto& f : c.per_index) pi.push_back(family_json(f));
    j["per_index"] = pi;
  }
  if (!c.stopping.empty()) {
    json atoms = json::array();
    for (const auto& a : c.stopping) atoms.push_back({a.value, a.prob});
    j["stopping"] = {{"kind", "discrete"}, {"atoms", atoms}};
  }
  j["ruin"] = {{"kind", c.ruin.kind},
               {"functional", c.ruin.functional},
               {"weights", c.ruin.weights},
               {"premium_x", c.ruin.premium_x},
               {"premium_y", c.ruin.premium_y}};
  json tol{{"rows", c.tolerance.rows}};
  if (c.tolerance.relative) tol["relative"] = *c.tolerance.relative;
  if (c.tolerance.stderr_multiple) tol["stderr_multiple"] = *c.tolerance.stderr_multiple;
  j["tolerance"] = tol;
  return j.dump(2);
}

}  // namespace brvlab
