#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "netstab/builtin_scenarios.hpp"
#include "test_support.hpp"

using namespace netstab;
using namespace netstab::testing;

namespace {

std::string scenario_path(std::string_view name) {
  return std::string(NETSTAB_SCENARIO_DIR) + "/" + std::string(name) + ".json";
}

Json minimal() {
  return Json::parse(R"({
    "version": 1,
    "patches": [
      {"model": "lotka_volterra", "params": {"r": 1, "c": 1, "b": 1, "m": 1}},
      {"model": "lotka_volterra", "params": {"r": 1, "c": 1, "b": 1, "m": 1}}
    ],
    "layers": [
      {"variable": 1, "edges": [{"u": 1, "v": 2, "w": 0.5}]},
      {"variable": 2, "edges": [{"u": 1, "v": 2, "w": 0.5}]}
    ],
    "equilibrium": {"per_patch": [1, 1]}
  })");
}

std::string error_path(const Json& doc) {
  try {
    (void)parse_scenario(doc);
  } catch (const ScenarioError& e) {
    return e.path();
  }
  return "<accepted>";
}

TEST(Scenario, BundledFilesMatchBuiltins) {
  for (const auto& b : kBuiltinScenarios) {
    std::ifstream in(scenario_path(b.name), std::ios::binary);
    ASSERT_TRUE(in) << b.name;
    std::ostringstream text;
    text << in.rdbuf();
    EXPECT_EQ(text.str(), b.json) << b.name << ": rerun tools/embed_scenarios.py";
    const Json file = Json::parse(text.str());
    EXPECT_EQ(parse_scenario(file).name, b.name);
  }
  EXPECT_TRUE(builtin_scenario("example2_set1").has_value());
  EXPECT_FALSE(builtin_scenario("nope").has_value());
}

TEST(Scenario, MinimalDefaults) {
  const auto s = parse_scenario(minimal());
  EXPECT_EQ(s.patches.size(), 2u);
  EXPECT_EQ(s.analysis.epsilon, 0.0);
  EXPECT_EQ(s.analysis.basis_scaling, kDefaultBasisScaling);
  EXPECT_FALSE(s.analysis.simulate);
  EXPECT_FALSE(s.reference.has_value());
  EXPECT_EQ(s.equilibrium.mode, EquilibriumMode::per_patch);
}

TEST(Scenario, ErrorPointers) {
  auto doc = minimal();
  doc["patches"] = Json::array();
  EXPECT_EQ(error_path(doc), "/patches");

  doc = minimal();
  doc["colour"] = "red";
  EXPECT_EQ(error_path(doc), "/colour");

  doc = minimal();
  doc["layers"][1]["edges"].push_back(Json{{"u", 2}, {"v", 1}, {"w", 1.0}});
  EXPECT_EQ(error_path(doc), "/layers/1/edges/1");

  doc = minimal();
  doc["version"] = 2;
  EXPECT_EQ(error_path(doc), "/version");

  doc = minimal();
  doc["patches"][1]["params"]["r"] = -1;
  EXPECT_EQ(error_path(doc).rfind("/patches/1", 0), 0u);

  doc = minimal();
  doc["layers"][0]["edges"][0]["w"] = -0.5;
  EXPECT_EQ(error_path(doc).rfind("/layers/0/edges/0", 0), 0u);

  doc = minimal();
  doc["equilibrium"]["solve_from"] = Json::array({1, 1});
  EXPECT_EQ(error_path(doc), "/equilibrium");

  doc = minimal();
  doc["equilibrium"]["per_patch"] = Json::array({1});
  EXPECT_EQ(error_path(doc), "/equilibrium/per_patch");

  doc = minimal();
  doc["layers"].erase(1);
  EXPECT_EQ(error_path(doc), "/layers");

  EXPECT_THROW((void)parse_scenario_text("{not json"), ScenarioError);
  EXPECT_THROW((void)parse_scenario_file("/nonexistent/scenario.json"), Error);
}

TEST(Scenario, RoundTrip) {
  for (const auto& b : kBuiltinScenarios) {
    const auto s = parse_scenario_text(b.json);
    const Json once = to_json(s);
    EXPECT_EQ(to_json(parse_scenario(once)), once) << b.name;
  }
}

TEST(Scenario, BuildsExampleSystems) {
  const auto s = parse_scenario_file(scenario_path("example2_set1"));
  const auto sys = build_system(s);
  EXPECT_EQ(sys.patches(), 5u);
  EXPECT_EQ(sys.block_laplacian(), example2(1).block_laplacian());
  const auto eq = resolve_equilibrium(s, sys);
  EXPECT_NEAR(eq.per_patch[0], 3.0 / 7, 1e-10);
  EXPECT_NEAR(eq.per_patch[1], 55.0 / 49, 1e-10);
}

TEST(Analyze, ExitCodes) {
  const std::pair<const char*, int> expected[] = {{"example1_set1", kExitStable},
                                                  {"example1_set2", kExitUnstable},
                                                  {"example2_set1", kExitStable},
                                                  {"example2_set2", kExitUnstable}};
  for (const auto& [name, code] : expected) {
    const auto run = run_analyze(parse_scenario_file(scenario_path(name)));
    EXPECT_EQ(run.exit_code, code) << name;
    EXPECT_EQ(run.report["verdicts"]["sufficient"], "inconclusive") << name;
    EXPECT_TRUE(run.report["simulation"].is_null());
  }
}

TEST(Analyze, ReportRoundTripsAndIsDeterministic) {
  const auto s = parse_scenario_file(scenario_path("example1_set1"));
  const auto a = dump_report(run_analyze(s).report);
  const auto b = dump_report(run_analyze(s).report);
  EXPECT_EQ(a, b);
  EXPECT_EQ(dump_report(Json::parse(a)), a);
  const auto r = Json::parse(a);
  for (const char* key : {"tool", "scenario", "equilibrium", "laplacian", "theorem", "spectrum",
                          "abscissa", "verdicts", "simulation", "notes", "provenance"})
    EXPECT_TRUE(r.contains(key)) << key;
  EXPECT_EQ(r["spectrum"].size(), 6u);
  EXPECT_NEAR(r["laplacian"]["lambda2"].get<double>(), 0.1461, 5e-5);
}

TEST(Analyze, OverridesAndSimulation) {
  const auto s = parse_scenario_file(scenario_path("example1_set1"));
  RunOverrides o;
  o.epsilon = 0.05;
  o.simulate = true;
  o.seed = 3;
  const auto run = run_analyze(s, o);
  EXPECT_FALSE(run.report["theorem"]["condition_a"]["holds"].get<bool>());
  EXPECT_EQ(run.report["provenance"]["seed"], 3);
  ASSERT_TRUE(run.simulation.has_value());
  EXPECT_EQ(run.report["verdicts"]["simulated"], "converged");
}

TEST(Analyze, NullTauSerialisesAsNull) {
  auto doc = minimal();
  doc["patches"].erase(1);
  doc["layers"][0]["edges"] = Json::array();
  doc["layers"][1]["edges"] = Json::array();
  const auto run = run_analyze(parse_scenario(doc));
  EXPECT_TRUE(run.report["theorem"]["condition_b"]["tau"].is_null());
  EXPECT_EQ(run.exit_code, kExitMarginal);
}

}  // namespace
