/**
 * @file scenario.hpp
 * @brief Scenario documents (JSON, strict schema) and the analysis pipeline
 *        that turns one into a machine-readable report.
 *
 * Every schema violation raises ScenarioError carrying a JSON pointer to the
 * offending value. Unknown keys are errors.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "netstab/assembly.hpp"
#include "netstab/error.hpp"
#include "netstab/graph.hpp"
#include "netstab/models.hpp"
#include "netstab/sim.hpp"
#include "netstab/stability.hpp"

namespace netstab {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolName = "netstab";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kScenarioVersion = 1;

struct PatchSpec {
  std::string model;
  ParamMap params;
};

struct LayerSpec {
  std::size_t variable = 1;
  std::vector<LayerEdge> edges;
};

enum class EquilibriumMode { per_patch, solve_from };

struct EquilibriumSpec {
  EquilibriumMode mode = EquilibriumMode::per_patch;
  std::vector<double> values;
};

struct SimSpec {
  double delta = 1e-3;
  std::optional<double> horizon;
  std::size_t trials = 8;
  std::uint64_t seed = 0;
};

struct AnalysisSpec {
  double epsilon = 0.0;
  double basis_scaling = kDefaultBasisScaling;
  bool strict = false;
  bool simulate = false;
  SimSpec sim;
};

/// Published values the scenario is meant to reproduce; informational only.
struct ReferenceSpec {
  std::vector<Complex> spectrum;
  std::string note;
};

struct Scenario {
  int version = kScenarioVersion;
  std::string name;
  std::string description;
  std::vector<PatchSpec> patches;
  std::vector<LayerSpec> layers;
  EquilibriumSpec equilibrium;
  AnalysisSpec analysis;
  std::optional<ReferenceSpec> reference;
};

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::string ptr(const std::string& base, std::string_view key) {
  std::string out = base + "/";
  for (char ch : key) {
    if (ch == '~') out += "~0";
    else if (ch == '/') out += "~1";
    else out += ch;
  }
  return out;
}

inline std::string ptr(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

inline const Json& expect_object(const Json& j, const std::string& path,
                                 std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ScenarioError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ScenarioError(ptr(path, key), "unknown key");
    }
  }
  return j;
}

inline const Json& require_key(const Json& obj, const std::string& path, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ScenarioError(ptr(path, key), "missing required key");
  return *it;
}

inline double read_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(path, "number is not finite");
  return v;
}

inline std::int64_t read_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ScenarioError(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline std::size_t read_index(const Json& j, const std::string& path, std::size_t hi) {
  const auto v = read_integer(j, path);
  if (v < 1 || static_cast<std::size_t>(v) > hi) {
    throw ScenarioError(path, "index " + std::to_string(v) + " outside 1.." + std::to_string(hi));
  }
  return static_cast<std::size_t>(v);
}

inline std::string read_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ScenarioError(path, "expected a string");
  return j.get<std::string>();
}

inline bool read_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ScenarioError(path, "expected a boolean");
  return j.get<bool>();
}

inline std::vector<double> read_numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(read_number(j[k], ptr(path, k)));
  return out;
}

inline PatchSpec parse_patch(const Json& j, const std::string& path) {
  expect_object(j, path, {"model", "params"});
  PatchSpec p;
  p.model = read_string(require_key(j, path, "model"), ptr(path, "model"));
  const std::string ppath = ptr(path, "params");
  const auto& params = require_key(j, path, "params");
  if (!params.is_object()) throw ScenarioError(ppath, "expected an object");
  for (const auto& [key, value] : params.items()) {
    p.params[key] = read_number(value, ptr(ppath, key));
  }
  try {
    (void)PatchModel::from_params(p.model, p.params);
  } catch (const InvalidArgument& e) {
    throw ScenarioError(path, e.what());
  }
  return p;
}

inline LayerSpec parse_layer(const Json& j, const std::string& path, std::size_t n,
                             std::size_t m) {
  expect_object(j, path, {"variable", "edges"});
  LayerSpec layer;
  layer.variable = read_index(require_key(j, path, "variable"), ptr(path, "variable"), n);
  const std::string epath = ptr(path, "edges");
  const auto& edges = require_key(j, path, "edges");
  if (!edges.is_array()) throw ScenarioError(epath, "expected an array");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string p = ptr(epath, k);
    expect_object(edges[k], p, {"u", "v", "w"});
    LayerEdge e;
    e.u = read_index(require_key(edges[k], p, "u"), ptr(p, "u"), m);
    e.v = read_index(require_key(edges[k], p, "v"), ptr(p, "v"), m);
    e.weight = read_number(require_key(edges[k], p, "w"), ptr(p, "w"));
    if (e.u == e.v) throw ScenarioError(p, "self loop");
    if (e.weight < 0.0) throw ScenarioError(ptr(p, "w"), "weight must be >= 0");
    if (!seen.insert(std::minmax(e.u, e.v)).second) {
      throw ScenarioError(p, "duplicate edge (" + std::to_string(e.u) + "," +
                                 std::to_string(e.v) + ")");
    }
    layer.edges.push_back(e);
  }
  return layer;
}

inline AnalysisSpec parse_analysis(const Json& j, const std::string& path) {
  expect_object(j, path, {"epsilon", "basis_scaling", "strict", "simulate", "sim"});
  AnalysisSpec a;
  if (j.contains("epsilon")) {
    a.epsilon = read_number(j["epsilon"], ptr(path, "epsilon"));
    if (a.epsilon < 0.0) throw ScenarioError(ptr(path, "epsilon"), "must be >= 0");
  }
  if (j.contains("basis_scaling")) {
    a.basis_scaling = read_number(j["basis_scaling"], ptr(path, "basis_scaling"));
    if (!(a.basis_scaling > 0.0 && a.basis_scaling <= 1.0)) {
      throw ScenarioError(ptr(path, "basis_scaling"), "must lie in (0, 1]");
    }
  }
  if (j.contains("strict")) a.strict = read_bool(j["strict"], ptr(path, "strict"));
  if (j.contains("simulate")) a.simulate = read_bool(j["simulate"], ptr(path, "simulate"));
  if (j.contains("sim")) {
    const std::string sp = ptr(path, "sim");
    const auto& s = expect_object(j["sim"], sp, {"delta", "horizon", "trials", "seed"});
    if (s.contains("delta")) {
      a.sim.delta = read_number(s["delta"], ptr(sp, "delta"));
      if (a.sim.delta < 0.0) throw ScenarioError(ptr(sp, "delta"), "must be >= 0");
    }
    if (s.contains("horizon")) {
      a.sim.horizon = read_number(s["horizon"], ptr(sp, "horizon"));
      if (!(*a.sim.horizon > 0.0)) throw ScenarioError(ptr(sp, "horizon"), "must be > 0");
    }
    if (s.contains("trials")) {
      const auto t = read_integer(s["trials"], ptr(sp, "trials"));
      if (t < 1) throw ScenarioError(ptr(sp, "trials"), "must be >= 1");
      a.sim.trials = static_cast<std::size_t>(t);
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) {
        throw ScenarioError(ptr(sp, "seed"), "expected a non-negative integer");
      }
      a.sim.seed = s["seed"].get<std::uint64_t>();
    }
  }
  return a;
}

inline ReferenceSpec parse_reference(const Json& j, const std::string& path) {
  expect_object(j, path, {"spectrum", "note"});
  ReferenceSpec r;
  if (j.contains("note")) r.note = read_string(j["note"], ptr(path, "note"));
  const std::string sp = ptr(path, "spectrum");
  const auto& s = require_key(j, path, "spectrum");
  if (!s.is_array()) throw ScenarioError(sp, "expected an array of [re, im] pairs");
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto pair = read_numbers(s[k], ptr(sp, k));
    if (pair.size() != 2) throw ScenarioError(ptr(sp, k), "expected [re, im]");
    r.spectrum.emplace_back(pair[0], pair[1]);
  }
  return r;
}

}  // namespace detail

[[nodiscard]] inline Scenario parse_scenario(const Json& doc) {
  using namespace detail;
  const std::string root;
  expect_object(doc, root,
                {"version", "name", "description", "patches", "layers", "equilibrium", "analysis",
                 "reference"});
  Scenario s;
  const auto version = read_integer(require_key(doc, root, "version"), "/version");
  if (version != kScenarioVersion) {
    throw ScenarioError("/version", "unsupported version " + std::to_string(version) +
                                        " (expected " + std::to_string(kScenarioVersion) + ")");
  }
  s.version = static_cast<int>(version);
  if (doc.contains("name")) s.name = read_string(doc["name"], "/name");
  if (doc.contains("description")) s.description = read_string(doc["description"], "/description");

  const auto& patches = require_key(doc, root, "patches");
  if (!patches.is_array()) throw ScenarioError("/patches", "expected an array");
  if (patches.empty()) throw ScenarioError("/patches", "need at least one patch");
  for (std::size_t k = 0; k < patches.size(); ++k) {
    s.patches.push_back(parse_patch(patches[k], ptr("/patches", k)));
  }
  const std::size_t m = s.patches.size();
  const std::size_t n = PatchModel::from_params(s.patches[0].model, s.patches[0].params).dim();

  const auto& layers = require_key(doc, root, "layers");
  if (!layers.is_array()) throw ScenarioError("/layers", "expected an array");
  if (layers.size() != n) {
    throw ScenarioError("/layers", "expected " + std::to_string(n) +
                                       " layers (one per state variable), got " +
                                       std::to_string(layers.size()));
  }
  std::vector<bool> present(n, false);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto layer = parse_layer(layers[k], ptr("/layers", k), n, m);
    if (present[layer.variable - 1]) {
      throw ScenarioError(ptr(ptr("/layers", k), "variable"),
                          "variable " + std::to_string(layer.variable) + " appears twice");
    }
    present[layer.variable - 1] = true;
    s.layers.push_back(std::move(layer));
  }
  std::sort(s.layers.begin(), s.layers.end(),
            [](const LayerSpec& a, const LayerSpec& b) { return a.variable < b.variable; });

  const auto& eq = expect_object(require_key(doc, root, "equilibrium"), "/equilibrium",
                                 {"per_patch", "solve_from"});
  if (eq.contains("per_patch") == eq.contains("solve_from")) {
    throw ScenarioError("/equilibrium", "exactly one of per_patch or solve_from is required");
  }
  const bool per_patch = eq.contains("per_patch");
  s.equilibrium.mode = per_patch ? EquilibriumMode::per_patch : EquilibriumMode::solve_from;
  const std::string ep = per_patch ? "/equilibrium/per_patch" : "/equilibrium/solve_from";
  s.equilibrium.values = read_numbers(per_patch ? eq["per_patch"] : eq["solve_from"], ep);
  if (s.equilibrium.values.size() != n) {
    throw ScenarioError(ep, "expected " + std::to_string(n) + " values, got " +
                                std::to_string(s.equilibrium.values.size()));
  }

  if (doc.contains("analysis")) s.analysis = parse_analysis(doc["analysis"], "/analysis");
  if (doc.contains("reference")) s.reference = parse_reference(doc["reference"], "/reference");
  return s;
}

[[nodiscard]] inline Scenario parse_scenario_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ScenarioError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

[[nodiscard]] inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

// ---------------------------------------------------------------- building

[[nodiscard]] inline CoupledSystem build_system(const Scenario& s) {
  std::vector<PatchModel> models;
  for (const auto& p : s.patches) models.push_back(PatchModel::from_params(p.model, p.params));
  std::vector<std::vector<LayerEdge>> layers;
  for (const auto& l : s.layers) layers.push_back(l.edges);
  return CoupledSystem(std::move(models), LayeredNetwork(s.patches.size(), std::move(layers)));
}

/// Verified homogeneous equilibrium; solve_from runs Newton on patch 1's model first.
[[nodiscard]] inline HomogeneousEquilibrium resolve_equilibrium(const Scenario& s,
                                                                const CoupledSystem& system) {
  if (s.equilibrium.mode == EquilibriumMode::per_patch) {
    return make_homogeneous_equilibrium(system, s.equilibrium.values);
  }
  const auto sol = find_equilibrium(system.models().front(), s.equilibrium.values);
  auto eq = make_homogeneous_equilibrium(system, sol.state);
  eq.warnings.insert(eq.warnings.begin(), sol.warnings.begin(), sol.warnings.end());
  return eq;
}

// ---------------------------------------------------------------- serialisation

namespace detail {

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json spectrum_json(const std::vector<Complex>& spectrum) {
  Json out = Json::array();
  for (auto z : spectrum) out.push_back(Json{{"re", z.real()}, {"im", z.imag()}});
  return out;
}

}  // namespace detail

/// Normalised echo of a scenario; parse_scenario(to_json(s)) reproduces s.
[[nodiscard]] inline Json to_json(const Scenario& s) {
  Json doc;
  doc["version"] = s.version;
  if (!s.name.empty()) doc["name"] = s.name;
  if (!s.description.empty()) doc["description"] = s.description;
  doc["patches"] = Json::array();
  for (const auto& p : s.patches) {
    Json params = Json::object();
    for (const auto& [k, v] : p.params) params[k] = v;
    doc["patches"].push_back(Json{{"model", p.model}, {"params", params}});
  }
  doc["layers"] = Json::array();
  for (const auto& l : s.layers) {
    Json edges = Json::array();
    for (const auto& e : l.edges) edges.push_back(Json{{"u", e.u}, {"v", e.v}, {"w", e.weight}});
    doc["layers"].push_back(Json{{"variable", l.variable}, {"edges", edges}});
  }
  doc["equilibrium"] = Json::object();
  doc["equilibrium"][s.equilibrium.mode == EquilibriumMode::per_patch ? "per_patch"
                                                                       : "solve_from"] =
      s.equilibrium.values;
  Json sim{{"delta", s.analysis.sim.delta}};
  if (s.analysis.sim.horizon) sim["horizon"] = *s.analysis.sim.horizon;
  sim["trials"] = s.analysis.sim.trials;
  sim["seed"] = s.analysis.sim.seed;
  doc["analysis"] = Json{{"epsilon", s.analysis.epsilon},
                         {"basis_scaling", s.analysis.basis_scaling},
                         {"strict", s.analysis.strict},
                         {"simulate", s.analysis.simulate},
                         {"sim", sim}};
  if (s.reference) {
    Json spec = Json::array();
    for (auto z : s.reference->spectrum) spec.push_back(Json::array({z.real(), z.imag()}));
    doc["reference"] = Json{{"spectrum", spec}};
    if (!s.reference->note.empty()) doc["reference"]["note"] = s.reference->note;
  }
  return doc;
}

[[nodiscard]] inline Json to_json(const ConditionReport& c) {
  return Json{{"condition_a",
               {{"holds", c.condition_a.holds},
                {"epsilon", c.condition_a.epsilon},
                {"strict", c.condition_a.strict},
                {"row_margins", c.condition_a.row_margins}}},
              {"condition_b",
               {{"holds", c.condition_b.holds},
                {"lambda2", c.condition_b.lambda2},
                {"tau", detail::number_or_null(c.condition_b.tau)},
                {"scaling_c", c.condition_b.scaling_c},
                {"first_rows_edge", detail::number_or_null(c.condition_b.first_rows_edge)}}},
              {"sufficient_stable", c.sufficient_stable},
              {"verdict", c.verdict()}};
}

[[nodiscard]] inline Json to_json(const ConvergenceResult& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials) {
    Json tj{{"classification", to_string(t.classification)},
            {"final_distance", detail::number_or_null(t.final_distance)}};
    if (!t.note.empty()) tj["note"] = t.note;
    trials.push_back(std::move(tj));
  }
  return Json{{"classification", to_string(r.classification)},
              {"initial_distance", r.initial_distance},
              {"final_distance", detail::number_or_null(r.final_distance)},
              {"horizon", r.horizon},
              {"converged_factor", kConvergedFactor},
              {"diverged_factor", kDivergedFactor},
              {"trials", trials}};
}

// ---------------------------------------------------------------- pipeline

/// Command-line overrides applied on top of a scenario's analysis block.
struct RunOverrides {
  std::optional<double> epsilon;
  std::optional<double> basis_scaling;
  bool strict = false;
  std::optional<std::uint64_t> seed;
  std::optional<bool> simulate;
};

struct AnalysisRun {
  Scenario scenario;
  HomogeneousEquilibrium equilibrium;
  StabilityReport stability;
  std::optional<ConvergenceResult> simulation;
  Json report;
  int exit_code = 1;
};

inline constexpr int kExitStable = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnstable = 2;
inline constexpr int kExitMarginal = 3;
inline constexpr int kExitUsage = 64;

[[nodiscard]] constexpr int exit_code_for(Verdict v) noexcept {
  switch (v) {
    case Verdict::stable: return kExitStable;
    case Verdict::unstable: return kExitUnstable;
    case Verdict::marginal: return kExitMarginal;
  }
  return kExitMarginal;
}

[[nodiscard]] inline Scenario apply_overrides(Scenario s, const RunOverrides& o) {
  if (o.epsilon) s.analysis.epsilon = *o.epsilon;
  if (o.basis_scaling) s.analysis.basis_scaling = *o.basis_scaling;
  if (o.strict) s.analysis.strict = true;
  if (o.seed) s.analysis.sim.seed = *o.seed;
  if (o.simulate) s.analysis.simulate = *o.simulate;
  return s;
}

/**
 * @brief Equilibrium, Laplacians, theorem conditions, spectrum and optional
 *        simulation. Exit code follows the spectral verdict.
 */
[[nodiscard]] inline AnalysisRun run_analyze(const Scenario& input, const RunOverrides& o = {}) {
  AnalysisRun run;
  run.scenario = apply_overrides(input, o);
  const auto& s = run.scenario;
  const auto system = build_system(s);
  run.equilibrium = resolve_equilibrium(s, system);
  run.stability = analyze_stability(
      system, run.equilibrium,
      AnalysisOptions{s.analysis.epsilon, s.analysis.basis_scaling, s.analysis.strict});

  if (s.analysis.simulate) {
    PerturbOptions po;
    po.delta = s.analysis.sim.delta;
    po.horizon = s.analysis.sim.horizon ? *s.analysis.sim.horizon
                                        : default_horizon(run.stability.abscissa);
    po.trials = s.analysis.sim.trials;
    po.seed = s.analysis.sim.seed;
    run.simulation = perturb_and_classify(system, run.equilibrium, po);
  }

  const auto& lap = system.laplacians();
  Json connected = Json::array();
  for (std::size_t i = 1; i <= system.variables(); ++i)
    connected.push_back(is_connected(system.network(), i));

  Json& r = run.report;
  r["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
  r["scenario"] = to_json(s);
  r["equilibrium"] = Json{{"per_patch", run.equilibrium.per_patch},
                          {"residual_f", run.equilibrium.residual_f},
                          {"residual_L", run.equilibrium.residual_L},
                          {"warnings", run.equilibrium.warnings}};
  r["laplacian"] = Json{{"fiedler_per_layer", lap.fiedler_per_layer},
                        {"lambda2", lap.fiedler_min},
                        {"connected", connected}};
  r["theorem"] = to_json(*run.stability.condition);
  r["spectrum"] = detail::spectrum_json(run.stability.spectrum);
  r["abscissa"] = run.stability.abscissa;
  r["verdicts"] = Json{{"sufficient", run.stability.condition->verdict()},
                       {"spectral", to_string(run.stability.spectral_verdict)},
                       {"simulated", run.simulation ? Json(to_string(run.simulation->classification))
                                                    : Json(nullptr)}};
  r["simulation"] = run.simulation ? to_json(*run.simulation) : Json(nullptr);
  r["notes"] = run.stability.notes;
  r["provenance"] =
      Json{{"seed", s.analysis.sim.seed},
           {"tolerances",
            {{"verdict_band", kVerdictBand},
             {"reaction_residual", kReactionResidualTolerance},
             {"coupling_residual", kCouplingResidualTolerance},
             {"singular_condition", kSingularCondition},
             {"threshold_bracket", kThresholdTolerance}}}};
  run.exit_code = exit_code_for(run.stability.spectral_verdict);
  return run;
}

/// Indented, deterministic report text; parsing and re-dumping it is the identity.
[[nodiscard]] inline std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace netstab
