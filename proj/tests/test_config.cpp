#include "mppv/config.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace mppv {
namespace {

using nlohmann::json;

// Smallest config that parses: everything else is defaulted.
json minimal() {
  return json{
      {"name", "unit"},
      {"mixing", {{"family", "degenerate"}, {"value", 2.0}}},
      {"transform", "identity"},
      {"kernel", {{"family", "exponential"}}},
      {"simulation", {{"horizon", 4.0}, {"num_paths", 1000}, {"master_seed", 7}}},
  };
}

void expect_rejected(const json& root, const std::string& fragment) {
  try {
    scenario_from_json(root);
    FAIL() << "expected ConfigError mentioning '" << fragment << "'";
  } catch (const ConfigError& err) {
    EXPECT_NE(std::string(err.what()).find(fragment), std::string::npos)
        << "actual message: " << err.what();
  }
}

TEST(Config, MinimalParsesWithDefaults) {
  const ScenarioConfig cfg = scenario_from_json(minimal());
  const Scenario& sc = cfg.scenario;
  EXPECT_EQ(sc.name, "unit");
  EXPECT_FALSE(sc.is_control);
  EXPECT_DOUBLE_EQ(sc.horizon, 4.0);
  EXPECT_EQ(sc.num_paths, 1000u);
  EXPECT_EQ(sc.master_seed, 7u);
  EXPECT_EQ(sc.threads, 1u);
  EXPECT_EQ(sc.evaluator, EvaluatorChoice::kPoisson);
  EXPECT_TRUE(sc.battery.fdd_queries.empty());
  EXPECT_EQ(cfg.output.formats, (std::vector<std::string>{"json", "csv", "text"}));
  EXPECT_TRUE(cfg.output.dir.empty());
}

TEST(Config, UnknownKeysAreRejectedEverywhere) {
  auto with = [](json root, const char* path, json value) {
    json* node = &root;
    std::string key;
    for (const char* p = path;; ++p) {
      if (*p == '.' || *p == '\0') {
        if (*p == '\0') {
          (*node)[key] = std::move(value);
          break;
        }
        node = &(*node)[key];
        key.clear();
      } else {
        key += *p;
      }
    }
    return root;
  };

  expect_rejected(with(minimal(), "typo", 1), "(root): unknown key 'typo'");
  expect_rejected(with(minimal(), "mixing.scale", 1.0), "mixing: unknown key 'scale'");
  expect_rejected(with(minimal(), "kernel.rate", 1.0), "kernel: unknown key 'rate'");
  expect_rejected(with(minimal(), "simulation.seed", 1), "simulation: unknown key 'seed'");

  json root = minimal();
  root["conditional"] = {{"paths", 100}, {"nbins", 8}};
  expect_rejected(root, "conditional: unknown key 'nbins'");

  root = minimal();
  root["quadrature"] = {{"reltol", 1e-8}};
  expect_rejected(root, "quadrature: unknown key 'reltol'");

  root = minimal();
  root["battery"] = {{"fdds", json::array()}};
  expect_rejected(root, "battery: unknown key 'fdds'");

  root = minimal();
  root["battery"] = {{"fdd", {{{"times", {1.0}}, {"counts", {0}}}}}};
  expect_rejected(root, "battery.fdd[0]: unknown key 'counts'");

  root = minimal();
  root["tolerances"] = {{"z", 3.0}};
  expect_rejected(root, "tolerances: unknown key 'z'");

  root = minimal();
  root["output"] = {{"folder", "x"}};
  expect_rejected(root, "output: unknown key 'folder'");
}

TEST(Config, TypeErrorsArePathQualified) {
  json root = minimal();
  root["name"] = 12;
  expect_rejected(root, "(root).name: expected a string");

  root = minimal();
  root["control"] = "yes";
  expect_rejected(root, "control: expected a boolean");

  root = minimal();
  root["mixing"]["value"] = "two";
  expect_rejected(root, "mixing.value: expected a number");

  root = minimal();
  root["simulation"]["num_paths"] = -5;
  expect_rejected(root, "simulation.num_paths: expected a non-negative integer");

  root = minimal();
  root["simulation"]["num_paths"] = 10.5;
  expect_rejected(root, "simulation.num_paths: expected a non-negative integer");

  root = minimal();
  root["transform"] = 3;
  expect_rejected(root, "transform: expected a transform name");
}

TEST(Config, RangeErrorsAreRejected) {
  json root = minimal();
  root["simulation"]["horizon"] = 0.0;
  expect_rejected(root, "simulation.horizon: must be > 0");

  root = minimal();
  root["simulation"]["num_paths"] = 0;
  expect_rejected(root, "simulation.num_paths: must be >= 1");

  root = minimal();
  root["mixing"] = {{"family", "gamma"}, {"shape", -1.0}, {"rate", 1.0}};
  expect_rejected(root, "mixing.shape: must be > 0");

  root = minimal();
  root["kernel"] = {{"family", "erlang"}, {"shape", 65}};
  expect_rejected(root, "kernel.shape: must be <= 64");

  root = minimal();
  root["kernel"] = {{"family", "erlang"}, {"shape", 0}};
  expect_rejected(root, "kernel.shape: must be >= 1");
}

TEST(Config, UnknownNamesListAlternatives) {
  json root = minimal();
  root["mixing"]["family"] = "weibull";
  expect_rejected(root, "unknown law family 'weibull'");

  root = minimal();
  root["transform"] = "log";
  expect_rejected(root, "unknown transform 'log' (identity | reciprocal | exp)");

  root = minimal();
  root["kernel"]["family"] = "weibull";
  expect_rejected(root, "unknown kernel family 'weibull' (exponential | erlang)");

  root = minimal();
  root["evaluator"] = "saddlepoint";
  expect_rejected(root, "unknown evaluator 'saddlepoint' (auto | poisson | polya | quadrature)");
}

TEST(Config, DominatingNameMustMatchKernel) {
  json root = minimal();
  root["kernel"]["dominating"] = "rate";
  EXPECT_NO_THROW(scenario_from_json(root));

  root["kernel"]["dominating"] = "envelope";
  expect_rejected(root, "kernel.dominating: kernel exposes dominating function 'rate'");
}

TEST(Config, EvaluatorAutoFollowsTheRateLaw) {
  // Degenerate rates: plain Poisson.
  EXPECT_EQ(scenario_from_json(minimal()).scenario.evaluator, EvaluatorChoice::kPoisson);

  // Gamma rates under the identity transform: Polya closed form.
  json root = minimal();
  root["mixing"] = {{"family", "gamma"}, {"shape", 2.0}, {"rate", 2.0}};
  EXPECT_EQ(scenario_from_json(root).scenario.evaluator, EvaluatorChoice::kPolyaClosedForm);

  // A pushforward is never collapsed to a named family, so the reciprocal of
  // an inverse-gamma law goes through quadrature even though the pushforward
  // samples like a Gamma law.
  root = minimal();
  root["mixing"] = {{"family", "inverse-gamma"}, {"shape", 2.0}, {"rate", 2.0}};
  root["transform"] = "reciprocal";
  EXPECT_EQ(scenario_from_json(root).scenario.evaluator, EvaluatorChoice::kQuadrature);

  root = minimal();
  root["mixing"] = {{"family", "normal"}, {"mu", 0.3}, {"sigma2", 0.49}};
  root["transform"] = "exp";
  EXPECT_EQ(scenario_from_json(root).scenario.evaluator, EvaluatorChoice::kQuadrature);
}

TEST(Config, ExplicitEvaluatorMismatchIsRejected) {
  json root = minimal();
  root["mixing"] = {{"family", "inverse-gamma"}, {"shape", 2.0}, {"rate", 2.0}};
  root["transform"] = "reciprocal";
  root["evaluator"] = "polya";
  EXPECT_THROW(scenario_from_json(root), ConfigError);

  root["evaluator"] = "quadrature";
  EXPECT_NO_THROW(scenario_from_json(root));
}

TEST(Config, BatteryRoundTrips) {
  json root = minimal();
  root["battery"] = {
      {"fdd", {{{"times", {1.0, 2.0}}, {"increments", {0, 3}}}}},
      {"multinomial", {{{"times", {1.0, 2.0}}, {"counts", {1, 2}}}}},
      {"markov", {{{"times", {1.0, 2.0, 3.0}}, {"counts", {1, 1, 2}}}}},
      {"splitting", {{{"s", 1.0}, {"t", 2.0}, {"k", 1}, {"n", 3}}}},
      {"huang", {{0.5, 0.25}}},
  };
  const Scenario sc = scenario_from_json(root).scenario;
  ASSERT_EQ(sc.battery.fdd_queries.size(), 1u);
  EXPECT_EQ(sc.battery.fdd_queries[0].times, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(sc.battery.fdd_queries[0].increments, (std::vector<std::int64_t>{0, 3}));
  ASSERT_EQ(sc.battery.multinomial_cases.size(), 1u);
  EXPECT_EQ(sc.battery.multinomial_cases[0].cumulative, (std::vector<std::int64_t>{1, 2}));
  ASSERT_EQ(sc.battery.markov_cases.size(), 1u);
  EXPECT_EQ(sc.battery.markov_cases[0].times.size(), 3u);
  ASSERT_EQ(sc.battery.splitting_cases.size(), 1u);
  EXPECT_EQ(sc.battery.splitting_cases[0].k, 1);
  ASSERT_EQ(sc.battery.huang_w.size(), 1u);
  EXPECT_EQ(sc.battery.huang_w[0], (std::vector<double>{0.5, 0.25}));
}

TEST(Config, BatteryContentIsValidated) {
  json root = minimal();
  root["battery"] = {{"fdd", {{{"times", {2.0, 1.0}}, {"increments", {0, 1}}}}}};
  expect_rejected(root, "battery.fdd[0]");

  root = minimal();
  root["battery"] = {{"splitting", {{{"s", 2.0}, {"t", 1.0}, {"k", 0}, {"n", 0}}}}};
  expect_rejected(root, "requires s < t and k <= n");

  root = minimal();
  root["battery"] = {{"huang", {{0.5, -0.25}}}};
  expect_rejected(root, "battery.huang[0]: w entries must be > 0");

  root = minimal();
  root["battery"] = {{"markov", {{{"times", {1.0, 2.0}}, {"counts", {1}}}}}};
  expect_rejected(root, "times and counts must have equal length");

  // The scenario backstop still applies to parsed batteries.
  root = minimal();
  root["battery"] = {{"fdd", {{{"times", {9.0}}, {"increments", {0}}}}}};
  expect_rejected(root, "battery query time beyond the horizon");

  root = minimal();
  root["battery"] = {{"huang", {{3.0, 3.0}}}};
  expect_rejected(root, "huang w-vector sum beyond the horizon");
}

TEST(Config, TolerancesMergeOverDefaults) {
  json root = minimal();
  root["tolerances"] = {{"z_threshold", 4.0}, {"control_z", 6.0}};
  const Scenario sc = scenario_from_json(root).scenario;
  EXPECT_DOUBLE_EQ(sc.tol.z_threshold, 4.0);
  EXPECT_DOUBLE_EQ(sc.tol.control_z, 6.0);
  EXPECT_DOUBLE_EQ(sc.tol.exact_identity, 1e-8);
  EXPECT_DOUBLE_EQ(sc.tol.coverage, 0.95);

  root["tolerances"] = {{"coverage", 1.5}};
  expect_rejected(root, "tolerances");
}

TEST(Config, OutputSection) {
  json root = minimal();
  root["output"] = {{"dir", "reports"}, {"formats", {"json"}}};
  const ScenarioConfig cfg = scenario_from_json(root);
  EXPECT_EQ(cfg.output.dir, "reports");
  EXPECT_EQ(cfg.output.formats, (std::vector<std::string>{"json"}));

  root["output"]["formats"] = json::array();
  expect_rejected(root, "output.formats: expected a nonempty array");

  root["output"]["formats"] = {"yaml"};
  expect_rejected(root, "output.formats: entries must be json | csv | text");
}

TEST(Config, DiscreteAtomsParse) {
  json root = minimal();
  root["mixing"] = {{"family", "discrete"}, {"atoms", {{1.0, 0.25}, {2.0, 0.75}}}};
  const Scenario sc = scenario_from_json(root).scenario;
  const auto* law = sc.base.get_if<DiscreteLaw>();
  ASSERT_NE(law, nullptr);
  ASSERT_EQ(law->atoms.size(), 2u);
  EXPECT_DOUBLE_EQ(law->atoms[1].second, 0.75);

  root["mixing"]["atoms"] = {{1.0}};
  expect_rejected(root, "each atom must be a [theta, weight] pair of numbers");

  root["mixing"]["atoms"] = json::array();
  expect_rejected(root, "mixing.atoms: expected a nonempty array");
}

TEST(Config, LoadScenarioErrors) {
  EXPECT_THROW(load_scenario("/nonexistent/path.json"), ConfigError);

  const std::string path = testing::TempDir() + "/mppv_bad_config.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(load_scenario(path), ConfigError);
}

TEST(Config, ShippedScenariosLoad) {
  const std::string dir = MPPV_SCENARIO_DIR;

  const ScenarioConfig ex32 = load_scenario(dir + "/example_3_2.json");
  EXPECT_EQ(ex32.scenario.name, "example_3_2");
  EXPECT_FALSE(ex32.scenario.is_control);
  EXPECT_EQ(ex32.scenario.evaluator, EvaluatorChoice::kQuadrature);
  EXPECT_EQ(ex32.scenario.kernel.transform().name, "reciprocal");

  const ScenarioConfig ex33 = load_scenario(dir + "/example_3_3.json");
  EXPECT_EQ(ex33.scenario.evaluator, EvaluatorChoice::kQuadrature);
  EXPECT_EQ(ex33.scenario.kernel.transform().name, "exp");
  EXPECT_NE(ex33.scenario.base.get_if<NormalLaw>(), nullptr);

  const ScenarioConfig ctrl = load_scenario(dir + "/erlang_control.json");
  EXPECT_TRUE(ctrl.scenario.is_control);
  EXPECT_EQ(ctrl.scenario.evaluator, EvaluatorChoice::kPolyaClosedForm);
  EXPECT_EQ(ctrl.scenario.kernel.family(), KernelFamily::kErlang);
  EXPECT_EQ(ctrl.scenario.kernel.shape(), 2);
}

}  // namespace
}  // namespace mppv
