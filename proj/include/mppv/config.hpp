#pragma once
// Scenario configs as strict JSON. Every object is closed: an unknown key
// anywhere is a ConfigError with a path-qualified diagnostic, so typos fail
// before any computation starts. Values are range-checked here too; the
// Scenario's own validate() stays as a backstop for programmatic callers.

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mppv/errors.hpp"
#include "mppv/verify.hpp"

namespace mppv {

// Where report files go and which renderings are written.
struct OutputSpec {
  std::string dir;  // empty: the CLI resolves it (flag, then env, then cwd)
  std::vector<std::string> formats{"json", "csv", "text"};
};

struct ScenarioConfig {
  Scenario scenario;
  OutputSpec output;
};

namespace detail {

using config_json = nlohmann::json;

[[noreturn]] inline void config_fail(const std::string& where, const std::string& message) {
  throw ConfigError("config: " + where + ": " + message);
}

inline void require_object(const config_json& v, const std::string& where) {
  if (!v.is_object()) config_fail(where, "expected an object");
}

inline void check_keys(const config_json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  require_object(obj, where);
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known |= key == a;
    if (!known) config_fail(where, "unknown key '" + key + "'");
  }
}

inline const config_json& member(const config_json& obj, const std::string& where,
                                 const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_fail(where, std::string("missing required key '") + key + "'");
  return *it;
}

inline const config_json* member_opt(const config_json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double number_field(const config_json& obj, const std::string& where, const char* key) {
  const config_json& v = member(obj, where, key);
  if (!v.is_number()) config_fail(where + "." + key, "expected a number");
  return v.get<double>();
}

inline double positive_field(const config_json& obj, const std::string& where, const char* key) {
  const double x = number_field(obj, where, key);
  if (!(x > 0.0)) config_fail(where + "." + key, "must be > 0");
  return x;
}

inline std::uint64_t count_field(const config_json& obj, const std::string& where,
                                 const char* key, std::uint64_t min_value) {
  const config_json& v = member(obj, where, key);
  std::uint64_t x = 0;
  if (v.is_number_unsigned()) {
    x = v.get<std::uint64_t>();
  } else if (v.is_number_integer()) {
    // Signed storage is fine as long as the value is non-negative; only the
    // unsigned path can carry values above INT64_MAX (e.g. master seeds).
    const auto s = v.get<std::int64_t>();
    if (s < 0) config_fail(where + "." + key, "expected a non-negative integer");
    x = static_cast<std::uint64_t>(s);
  } else {
    config_fail(where + "." + key, "expected a non-negative integer");
  }
  if (x < min_value) {
    config_fail(where + "." + key, "must be >= " + std::to_string(min_value));
  }
  return x;
}

inline std::string string_field(const config_json& obj, const std::string& where,
                                const char* key) {
  const config_json& v = member(obj, where, key);
  if (!v.is_string()) config_fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> time_grid(const config_json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) config_fail(where, "expected a nonempty array of times");
  std::vector<double> times;
  times.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) config_fail(where, "times must be numbers");
    times.push_back(e.get<double>());
  }
  return times;
}

inline std::vector<std::int64_t> count_list(const config_json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) config_fail(where, "expected a nonempty array of counts");
  std::vector<std::int64_t> counts;
  counts.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number_integer()) config_fail(where, "counts must be integers");
    counts.push_back(e.get<std::int64_t>());
  }
  return counts;
}

inline MixingLaw parse_mixing(const config_json& obj, const std::string& where) {
  require_object(obj, where);
  const std::string family = string_field(obj, where, "family");
  if (family == "degenerate") {
    check_keys(obj, where, {"family", "value"});
    return MixingLaw::degenerate(positive_field(obj, where, "value"));
  }
  if (family == "gamma") {
    check_keys(obj, where, {"family", "shape", "rate"});
    return MixingLaw::gamma(positive_field(obj, where, "shape"),
                            positive_field(obj, where, "rate"));
  }
  if (family == "inverse-gamma") {
    check_keys(obj, where, {"family", "shape", "rate"});
    return MixingLaw::inverse_gamma(positive_field(obj, where, "shape"),
                                    positive_field(obj, where, "rate"));
  }
  if (family == "lognormal") {
    check_keys(obj, where, {"family", "mu", "sigma2"});
    return MixingLaw::log_normal(number_field(obj, where, "mu"),
                                 positive_field(obj, where, "sigma2"));
  }
  if (family == "normal") {
    check_keys(obj, where, {"family", "mu", "sigma2"});
    return MixingLaw::normal(number_field(obj, where, "mu"),
                             positive_field(obj, where, "sigma2"));
  }
  if (family == "discrete") {
    check_keys(obj, where, {"family", "atoms"});
    const config_json& atoms = member(obj, where, "atoms");
    if (!atoms.is_array() || atoms.empty()) {
      config_fail(where + ".atoms", "expected a nonempty array of [theta, weight] pairs");
    }
    std::vector<std::pair<double, double>> pairs;
    for (const auto& a : atoms) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
        config_fail(where + ".atoms", "each atom must be a [theta, weight] pair of numbers");
      }
      pairs.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    return MixingLaw::discrete(std::move(pairs));
  }
  config_fail(where + ".family", "unknown law family '" + family + "'");
}

inline const Transform& parse_transform(const config_json& v, const std::string& where) {
  if (!v.is_string()) config_fail(where, "expected a transform name");
  const std::string name = v.get<std::string>();
  if (name != "identity" && name != "reciprocal" && name != "exp") {
    config_fail(where, "unknown transform '" + name + "' (identity | reciprocal | exp)");
  }
  return transform_by_name(name);
}

inline InterarrivalKernel parse_kernel(const config_json& obj, const std::string& where,
                                       const Transform& transform) {
  require_object(obj, where);
  const std::string family = string_field(obj, where, "family");
  InterarrivalKernel kernel = InterarrivalKernel::exponential(transform);
  if (family == "exponential") {
    check_keys(obj, where, {"family", "dominating"});
  } else if (family == "erlang") {
    check_keys(obj, where, {"family", "shape", "dominating"});
    const auto shape = count_field(obj, where, "shape", 1);
    if (shape > 64) config_fail(where + ".shape", "must be <= 64");
    kernel = InterarrivalKernel::erlang(static_cast<int>(shape), transform);
  } else {
    config_fail(where + ".family", "unknown kernel family '" + family +
                                       "' (exponential | erlang)");
  }
  // The dominating-function name is declarative; it must match what the
  // kernel actually exposes.
  if (const config_json* dom = member_opt(obj, "dominating")) {
    if (!dom->is_string() || dom->get<std::string>() != kernel.dominating_name()) {
      config_fail(where + ".dominating",
                  "kernel exposes dominating function '" +
                      std::string(kernel.dominating_name()) + "'");
    }
  }
  return kernel;
}

inline EvaluatorChoice parse_evaluator(const config_json* v, const Scenario& sc,
                                       const std::string& where) {
  std::string name = "auto";
  if (v != nullptr) {
    if (!v->is_string()) config_fail(where, "expected a string");
    name = v->get<std::string>();
  }
  if (name == "poisson") return EvaluatorChoice::kPoisson;
  if (name == "polya") return EvaluatorChoice::kPolyaClosedForm;
  if (name == "quadrature") return EvaluatorChoice::kQuadrature;
  if (name != "auto") {
    config_fail(where, "unknown evaluator '" + name + "' (auto | poisson | polya | quadrature)");
  }
  const MixingLaw rates = sc.rate_law();
  if (rates.get_if<DegenerateLaw>() != nullptr) return EvaluatorChoice::kPoisson;
  if (rates.get_if<GammaLaw>() != nullptr) return EvaluatorChoice::kPolyaClosedForm;
  return EvaluatorChoice::kQuadrature;
}

inline Battery parse_battery(const config_json& obj, const std::string& where) {
  check_keys(obj, where, {"fdd", "multinomial", "splitting", "markov", "huang"});
  Battery battery;
  if (const config_json* fdd = member_opt(obj, "fdd")) {
    if (!fdd->is_array()) config_fail(where + ".fdd", "expected an array");
    std::size_t i = 0;
    for (const auto& e : *fdd) {
      const std::string at = where + ".fdd[" + std::to_string(i++) + "]";
      check_keys(e, at, {"times", "increments"});
      try {
        battery.fdd_queries.emplace_back(time_grid(member(e, at, "times"), at + ".times"),
                                         count_list(member(e, at, "increments"),
                                                    at + ".increments"));
      } catch (const DomainError& err) {
        config_fail(at, err.what());
      }
    }
  }
  auto parse_cumulative = [&](const config_json& v, const std::string& section) {
    std::vector<CumulativeCountCase> cases;
    if (!v.is_array()) config_fail(section, "expected an array");
    std::size_t i = 0;
    for (const auto& e : v) {
      const std::string at = section + "[" + std::to_string(i++) + "]";
      check_keys(e, at, {"times", "counts"});
      CumulativeCountCase c;
      c.times = time_grid(member(e, at, "times"), at + ".times");
      c.cumulative = count_list(member(e, at, "counts"), at + ".counts");
      if (c.times.size() != c.cumulative.size()) {
        config_fail(at, "times and counts must have equal length");
      }
      cases.push_back(std::move(c));
    }
    return cases;
  };
  if (const config_json* v = member_opt(obj, "multinomial")) {
    battery.multinomial_cases = parse_cumulative(*v, where + ".multinomial");
  }
  if (const config_json* v = member_opt(obj, "markov")) {
    battery.markov_cases = parse_cumulative(*v, where + ".markov");
  }
  if (const config_json* v = member_opt(obj, "splitting")) {
    if (!v->is_array()) config_fail(where + ".splitting", "expected an array");
    std::size_t i = 0;
    for (const auto& e : *v) {
      const std::string at = where + ".splitting[" + std::to_string(i++) + "]";
      check_keys(e, at, {"s", "t", "k", "n"});
      SplitCase c;
      c.s = positive_field(e, at, "s");
      c.t = positive_field(e, at, "t");
      c.k = static_cast<std::int64_t>(count_field(e, at, "k", 0));
      c.n = static_cast<std::int64_t>(count_field(e, at, "n", 0));
      if (!(c.s < c.t) || c.k > c.n) config_fail(at, "requires s < t and k <= n");
      battery.splitting_cases.push_back(c);
    }
  }
  if (const config_json* v = member_opt(obj, "huang")) {
    if (!v->is_array()) config_fail(where + ".huang", "expected an array of w-vectors");
    std::size_t i = 0;
    for (const auto& e : *v) {
      const std::string at = where + ".huang[" + std::to_string(i++) + "]";
      std::vector<double> w = time_grid(e, at);
      for (double wk : w) {
        if (!(wk > 0.0)) config_fail(at, "w entries must be > 0");
      }
      battery.huang_w.push_back(std::move(w));
    }
  }
  return battery;
}

inline Tolerances parse_tolerances(const config_json& obj, const std::string& where) {
  check_keys(obj, where, {"exact_identity", "z_threshold", "coverage", "pit_p_min",
                          "control_z", "rate_identity"});
  Tolerances tol;
  auto take = [&](const char* key, double& slot) {
    if (member_opt(obj, key) != nullptr) slot = positive_field(obj, where, key);
  };
  take("exact_identity", tol.exact_identity);
  take("z_threshold", tol.z_threshold);
  take("coverage", tol.coverage);
  take("pit_p_min", tol.pit_p_min);
  take("control_z", tol.control_z);
  take("rate_identity", tol.rate_identity);
  try {
    tol.validate();
  } catch (const DomainError& err) {
    config_fail(where, err.what());
  }
  return tol;
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& root) {
  using detail::config_fail;
  detail::check_keys(root, "(root)",
                     {"name", "control", "mixing", "transform", "kernel", "evaluator",
                      "simulation", "conditional", "quadrature", "battery", "tolerances",
                      "output"});

  ScenarioConfig out;
  Scenario& sc = out.scenario;
  sc.name = detail::string_field(root, "(root)", "name");
  if (sc.name.empty()) config_fail("name", "must be nonempty");

  if (const auto* v = detail::member_opt(root, "control")) {
    if (!v->is_boolean()) config_fail("control", "expected a boolean");
    sc.is_control = v->get<bool>();
  }

  sc.base = detail::parse_mixing(detail::member(root, "(root)", "mixing"), "mixing");
  const Transform& transform =
      detail::parse_transform(detail::member(root, "(root)", "transform"), "transform");
  sc.kernel = detail::parse_kernel(detail::member(root, "(root)", "kernel"), "kernel", transform);

  const nlohmann::json& simulation = detail::member(root, "(root)", "simulation");
  detail::check_keys(simulation, "simulation",
                     {"horizon", "num_paths", "master_seed", "threads"});
  sc.horizon = detail::positive_field(simulation, "simulation", "horizon");
  sc.num_paths = detail::count_field(simulation, "simulation", "num_paths", 1);
  sc.master_seed = detail::count_field(simulation, "simulation", "master_seed", 0);
  if (detail::member_opt(simulation, "threads") != nullptr) {
    sc.threads = static_cast<unsigned>(detail::count_field(simulation, "simulation", "threads", 1));
  }

  if (const auto* v = detail::member_opt(root, "conditional")) {
    detail::check_keys(*v, "conditional", {"paths", "per_path", "bins"});
    if (detail::member_opt(*v, "paths") != nullptr) {
      sc.pit_paths = detail::count_field(*v, "conditional", "paths", 1);
    }
    if (detail::member_opt(*v, "per_path") != nullptr) {
      sc.pit_per_path = static_cast<int>(detail::count_field(*v, "conditional", "per_path", 1));
    }
    if (detail::member_opt(*v, "bins") != nullptr) {
      sc.pit_bins = static_cast<int>(detail::count_field(*v, "conditional", "bins", 2));
    }
  }

  if (const auto* v = detail::member_opt(root, "quadrature")) {
    detail::check_keys(*v, "quadrature", {"rel_tol", "tail_mass", "max_intervals"});
    if (detail::member_opt(*v, "rel_tol") != nullptr) {
      sc.quadrature.rel_tol = detail::positive_field(*v, "quadrature", "rel_tol");
    }
    if (detail::member_opt(*v, "tail_mass") != nullptr) {
      sc.quadrature.tail_mass = detail::positive_field(*v, "quadrature", "tail_mass");
    }
    if (detail::member_opt(*v, "max_intervals") != nullptr) {
      sc.quadrature.max_intervals =
          static_cast<int>(detail::count_field(*v, "quadrature", "max_intervals", 1));
    }
  }

  if (const auto* v = detail::member_opt(root, "battery")) {
    sc.battery = detail::parse_battery(*v, "battery");
  }
  if (const auto* v = detail::member_opt(root, "tolerances")) {
    sc.tol = detail::parse_tolerances(*v, "tolerances");
  }

  sc.evaluator = detail::parse_evaluator(detail::member_opt(root, "evaluator"), sc, "evaluator");

  if (const auto* v = detail::member_opt(root, "output")) {
    detail::check_keys(*v, "output", {"dir", "formats"});
    if (detail::member_opt(*v, "dir") != nullptr) {
      out.output.dir = detail::string_field(*v, "output", "dir");
    }
    if (const auto* formats = detail::member_opt(*v, "formats")) {
      if (!formats->is_array() || formats->empty()) {
        config_fail("output.formats", "expected a nonempty array");
      }
      out.output.formats.clear();
      for (const auto& f : *formats) {
        const std::string name = f.is_string() ? f.get<std::string>() : "";
        if (name != "json" && name != "csv" && name != "text") {
          config_fail("output.formats", "entries must be json | csv | text");
        }
        out.output.formats.push_back(name);
      }
    }
  }

  try {
    sc.validate();
  } catch (const DomainError& err) {
    config_fail("(root)", err.what());
  }
  return out;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError("config: " + path + ": " + err.what());
  }
  return scenario_from_json(root);
}

}  // namespace mppv
