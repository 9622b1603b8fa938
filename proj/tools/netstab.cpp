// netstab: command-line front end for the network stability toolkit.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/format.h>

#include "netstab/netstab.hpp"

namespace {

using namespace netstab;

struct Options {
  std::vector<std::string> scenarios;
  std::optional<double> epsilon;
  std::optional<double> basis_scaling;
  bool strict = false;
  std::string json_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed;
  std::vector<double> bracket;
  unsigned jobs = 1;
  bool simulate = false;
  bool sweep = false;
  int set = 1;
};

class Style {
 public:
  Style() {
    const char* no_color = std::getenv("NO_COLOR");
    enabled_ = (no_color == nullptr || *no_color == '\0') && isatty(STDOUT_FILENO) != 0;
  }
  [[nodiscard]] std::string verdict(std::string_view word) const {
    if (!enabled_) return std::string(word);
    const char* code = "33";
    if (word == "stable" || word == "converged" || word == "sufficient_stable" || word == "yes")
      code = "32";
    else if (word == "unstable" || word == "diverged" || word == "no")
      code = "31";
    return fmt::format("\x1b[{}m{}\x1b[0m", code, word);
  }
  [[nodiscard]] std::string bold(std::string_view s) const {
    return enabled_ ? fmt::format("\x1b[1m{}\x1b[0m", s) : std::string(s);
  }

 private:
  bool enabled_ = false;
};

const Style& style() {
  static const Style s;
  return s;
}

Scenario load(const std::string& ref) {
  constexpr std::string_view prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) {
    const auto name = ref.substr(prefix.size());
    const auto text = builtin_scenario(name);
    if (!text) throw Error("no builtin scenario named '" + name + "'");
    return parse_scenario_text(*text);
  }
  return parse_scenario_file(ref);
}

RunOverrides overrides(const Options& o) {
  RunOverrides r;
  r.epsilon = o.epsilon;
  r.basis_scaling = o.basis_scaling;
  r.strict = o.strict;
  r.seed = o.seed;
  if (o.simulate) r.simulate = true;
  return r;
}

void write_json(const std::string& path, const Json& doc) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << dump_report(doc);
}

std::string complex_str(Complex z) {
  if (z.imag() == 0.0) return fmt::format("{:.10f}", z.real());
  return fmt::format("{:.10f} {} {:.10f}j", z.real(), z.imag() < 0 ? '-' : '+', std::abs(z.imag()));
}

std::string num_or_dash(double v) {
  return std::isfinite(v) ? fmt::format("{:.6g}", v) : std::string("-");
}

void print_spectrum(const std::vector<Complex>& spectrum) {
  fmt::print("  {:>3}  {:>16}  {:>16}\n", "#", "re", "im");
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    fmt::print("  {:>3}  {:>16.10f}  {:>16.10f}\n", k + 1, spectrum[k].real(), spectrum[k].imag());
  }
}

void print_condition(const ConditionReport& c) {
  const auto& a = c.condition_a;
  const auto& b = c.condition_b;
  fmt::print("condition (a)  epsilon={}{}  holds={}\n", a.epsilon, a.strict ? " strict" : "",
             style().verdict(a.holds ? "yes" : "no"));
  for (std::size_t p = 0; p < a.row_margins.size(); ++p)
    fmt::print("  row {:>2} margin {:>14.6e}\n", p + 1, a.row_margins[p]);
  fmt::print("condition (b)  lambda2={:.10g}  tau={}  c={:g}  holds={}\n", b.lambda2,
             num_or_dash(b.tau), b.scaling_c, style().verdict(b.holds ? "yes" : "no"));
  fmt::print("  first-row Gershgorin edge {}\n", num_or_dash(b.first_rows_edge));
  fmt::print("theorem verdict: {}\n", style().verdict(c.verdict()));
}

void print_analysis(const std::string& label, const AnalysisRun& run) {
  const auto& st = run.stability;
  fmt::print("{}\n", style().bold(label));
  fmt::print("equilibrium per patch: [{}]  residual f={:.3e} L={:.3e}\n",
             fmt::join(run.equilibrium.per_patch, ", "), run.equilibrium.residual_f,
             run.equilibrium.residual_L);
  fmt::print("lambda2 = {:.10g}\n", st.lambda2);
  print_condition(*st.condition);
  fmt::print("spectrum:\n");
  print_spectrum(st.spectrum);
  fmt::print("spectral abscissa {:.10g}  verdict {}\n", st.abscissa,
             style().verdict(to_string(st.spectral_verdict)));
  if (run.simulation) {
    fmt::print("simulation: {} (final/initial {:.4g}, horizon {:g})\n",
               style().verdict(to_string(run.simulation->classification)),
               run.simulation->distance_ratio(), run.simulation->horizon);
  }
  for (const auto& n : st.notes) fmt::print("note: {}\n", n);
}

// ---------------------------------------------------------------- subcommands

// Severity order: error, unstable, marginal, stable.
int worse(int a, int b) {
  auto rank = [](int c) {
    switch (c) {
      case kExitError: return 3;
      case kExitUnstable: return 2;
      case kExitMarginal: return 1;
      default: return 0;
    }
  };
  return rank(b) > rank(a) ? b : a;
}

int cmd_analyze(const Options& o) {
  if (o.scenarios.empty()) throw CLI::RequiredError("scenario");
  const auto ov = overrides(o);
  struct Outcome {
    std::optional<AnalysisRun> run;
    std::string error;
  };
  auto work = [&](const std::string& ref) {
    Outcome out;
    try {
      out.run = run_analyze(load(ref), ov);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  };

  std::vector<Outcome> outcomes(o.scenarios.size());
  const std::size_t jobs = std::max(1u, o.jobs);
  for (std::size_t start = 0; start < o.scenarios.size(); start += jobs) {
    std::vector<std::future<Outcome>> batch;
    const std::size_t stop = std::min(o.scenarios.size(), start + jobs);
    for (std::size_t k = start; k < stop; ++k)
      batch.push_back(std::async(std::launch::async, work, o.scenarios[k]));
    for (std::size_t k = start; k < stop; ++k) outcomes[k] = batch[k - start].get();
  }

  int code = kExitStable;
  Json reports = Json::array();
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (k) fmt::print("\n");
    if (!outcomes[k].run) {
      fmt::print(stderr, "netstab: error: {}: {}\n", o.scenarios[k], outcomes[k].error);
      code = worse(code, kExitError);
      continue;
    }
    print_analysis(o.scenarios[k], *outcomes[k].run);
    reports.push_back(outcomes[k].run->report);
    code = worse(code, outcomes[k].run->exit_code);
  }
  if (!o.json_path.empty() && !reports.empty()) {
    write_json(o.json_path, reports.size() == 1 ? reports[0] : reports);
  }
  return code;
}

Scenario single(const Options& o) {
  if (o.scenarios.size() != 1) throw CLI::ValidationError("scenario", "exactly one scenario expected");
  return apply_overrides(load(o.scenarios[0]), overrides(o));
}

int cmd_fiedler(const Options& o) {
  const auto s = single(o);
  const auto system = build_system(s);
  const auto& lap = system.laplacians();
  Json layers = Json::array();
  fmt::print("  {:>5}  {:>16}  {:>9}\n", "layer", "lambda2", "connected");
  for (std::size_t i = 1; i <= system.variables(); ++i) {
    const bool conn = is_connected(system.network(), i);
    fmt::print("  {:>5}  {:>16.10g}  {:>9}\n", i, lap.fiedler_per_layer[i - 1],
               conn ? "yes" : "no");
    if (!conn) fmt::print(stderr, "warning: layer {} is disconnected (lambda2 = 0)\n", i);
    layers.push_back(Json{{"layer", i}, {"lambda2", lap.fiedler_per_layer[i - 1]},
                          {"connected", conn}});
  }
  fmt::print("network lambda2 = {:.10g}\n", lap.fiedler_min);
  write_json(o.json_path, Json{{"layers", layers}, {"lambda2", lap.fiedler_min}});
  return kExitStable;
}

int cmd_eigs(const Options& o) {
  const auto s = single(o);
  const auto system = build_system(s);
  const auto eq = resolve_equilibrium(s, system);
  const auto st = spectral_verdict(system, eq);
  print_spectrum(st.spectrum);
  fmt::print("spectral abscissa {:.10g}  verdict {}\n", st.abscissa,
             style().verdict(to_string(st.spectral_verdict)));
  write_json(o.json_path, Json{{"spectrum", detail::spectrum_json(st.spectrum)},
                               {"abscissa", st.abscissa},
                               {"verdict", to_string(st.spectral_verdict)}});
  return exit_code_for(st.spectral_verdict);
}

int cmd_theorem(const Options& o) {
  const auto s = single(o);
  const auto system = build_system(s);
  const auto eq = resolve_equilibrium(s, system);
  const auto c = theorem_verdict(system, eq, s.analysis.epsilon, s.analysis.basis_scaling,
                                 s.analysis.strict);
  print_condition(c);
  Json doc = to_json(c);
  if (o.sweep) {
    const auto sweep = tau_sweep(system, eq, default_tau_sweep_scalings());
    fmt::print("tau sweep:\n  {:>8}  {:>14}\n", "c", "tau");
    Json rows = Json::array();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [cc, tau] : sweep) {
      fmt::print("  {:>8g}  {:>14}\n", cc, num_or_dash(tau));
      rows.push_back(Json{{"c", cc}, {"tau", detail::number_or_null(tau)}});
      best = std::min(best, tau);
    }
    fmt::print("minimum tau {}\n", num_or_dash(best));
    doc["sweep"] = rows;
    doc["sweep_min_tau"] = detail::number_or_null(best);
  }
  write_json(o.json_path, doc);
  return c.sufficient_stable ? kExitStable : kExitMarginal;
}

int cmd_simulate(const Options& o) {
  const auto s = single(o);
  const auto system = build_system(s);
  const auto eq = resolve_equilibrium(s, system);
  const auto st = spectral_verdict(system, eq);
  PerturbOptions po;
  po.delta = s.analysis.sim.delta;
  po.horizon = s.analysis.sim.horizon ? *s.analysis.sim.horizon : default_horizon(st.abscissa);
  po.trials = s.analysis.sim.trials;
  po.seed = s.analysis.sim.seed;
  const auto r = perturb_and_classify(system, eq, po);
  fmt::print("delta {:g}  horizon {:g}  trials {}  seed {}\n", po.delta, *po.horizon, po.trials,
             po.seed);
  for (std::size_t k = 0; k < r.trials.size(); ++k) {
    fmt::print("  trial {:>2}  {:<12}  final distance {:.6e}{}\n", k + 1,
               to_string(r.trials[k].classification), r.trials[k].final_distance,
               r.trials[k].note.empty() ? "" : "  (" + r.trials[k].note + ")");
  }
  fmt::print("classification: {}  (spectral verdict {})\n",
             style().verdict(to_string(r.classification)),
             to_string(st.spectral_verdict));

  if (!o.csv_path.empty()) {
    auto x0 = eq.stacked;
    const auto dir = perturbation_directions(system.size(), 1, po.seed).front();
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += po.delta * dir[i];
    const auto traj = integrate(system, x0, *po.horizon, Method::rkf45);
    std::ofstream out(o.csv_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + o.csv_path + "'");
    write_trajectory_csv(out, traj, system.patches(), system.variables());
  }
  write_json(o.json_path, to_json(r));
  switch (r.classification) {
    case Classification::converged: return kExitStable;
    case Classification::diverged: return kExitUnstable;
    case Classification::inconclusive: return kExitMarginal;
  }
  return kExitMarginal;
}

int cmd_threshold(const Options& o) {
  const auto s = single(o);
  const auto system = build_system(s);
  const auto eq = resolve_equilibrium(s, system);
  const double lo = o.bracket.empty() ? 1.0 : o.bracket[0];
  const double hi = o.bracket.empty() ? 20.0 : o.bracket[1];
  const auto t = coupling_threshold(system, eq, lo, hi);
  fmt::print("bracket [{:g}, {:g}]  abscissa {:.6g} .. {:.6g}\n", lo, hi, t.abscissa_lo,
             t.abscissa_hi);
  fmt::print("s* = {:.10g}  lambda2(s*) = {:.10g}  abscissa(s*) = {:.3e}  ({} bisections)\n",
             t.s_star, t.lambda2, t.abscissa, t.iterations);
  write_json(o.json_path, Json{{"bracket", {lo, hi}},
                               {"abscissa_lo", t.abscissa_lo},
                               {"abscissa_hi", t.abscissa_hi},
                               {"s_star", t.s_star},
                               {"lambda2", t.lambda2},
                               {"abscissa", t.abscissa},
                               {"iterations", t.iterations}});
  return kExitStable;
}

int cmd_demo(const Options& o) {
  if (o.scenarios.size() != 1 ||
      (o.scenarios[0] != "example1" && o.scenarios[0] != "example2")) {
    throw CLI::ValidationError("demo", "expected 'example1' or 'example2'");
  }
  if (o.set != 1 && o.set != 2) throw CLI::ValidationError("--set", "must be 1 or 2");
  const std::string name = fmt::format("{}_set{}", o.scenarios[0], o.set);
  const auto run = run_analyze(parse_scenario_text(*builtin_scenario(name)), overrides(o));
  print_analysis("builtin:" + name, run);
  if (run.scenario.reference) {
    auto expected = run.scenario.reference->spectrum;
    sort_spectrum(expected);
    fmt::print("\nexpected vs computed ({})\n", run.scenario.reference->note);
    fmt::print("  {:>3}  {:>30}  {:>30}  {:>10}\n", "#", "expected", "computed", "|diff|");
    const auto& got = run.stability.spectrum;
    for (std::size_t k = 0; k < std::max(expected.size(), got.size()); ++k) {
      const std::string e = k < expected.size() ? complex_str(expected[k]) : "";
      const std::string g = k < got.size() ? complex_str(got[k]) : "";
      const std::string d = k < expected.size() && k < got.size()
                                ? fmt::format("{:.2e}", std::abs(expected[k] - got[k]))
                                : "";
      fmt::print("  {:>3}  {:>30}  {:>30}  {:>10}\n", k + 1, e, g, d);
    }
  }
  write_json(o.json_path, run.report);
  return run.exit_code;
}

void add_common(CLI::App* sub, Options& o, bool many) {
  auto* pos = sub->add_option("scenario", o.scenarios,
                              many ? "Scenario files or builtin:NAME" : "Scenario file or builtin:NAME");
  if (!many) pos->expected(0, 1);
  sub->add_option("--epsilon", o.epsilon, "Condition (a) margin epsilon (>= 0)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--basis-scaling", o.basis_scaling, "Eigenvector scaling c in (0, 1]")
      ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0));
  sub->add_flag("--strict", o.strict, "Require strict diagonal dominance");
  sub->add_option("--json", o.json_path, "Write the machine-readable report here");
  sub->add_option("--csv", o.csv_path, "Write a trajectory CSV here (simulate)");
  sub->add_option("--seed", o.seed, "Seed for perturbation directions");
  sub->add_option("--bracket", o.bracket, "Weight-scale bracket LO HI (threshold)")
      ->expected(2);
  sub->add_option("--jobs", o.jobs, "Analyse this many scenarios concurrently")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local stability of networked reaction-diffusion systems at homogeneous equilibria",
               "netstab"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "Full pipeline: equilibrium, theorem, spectrum");
  add_common(analyze, o, true);
  analyze->add_flag("--simulate", o.simulate, "Also run the perturbation experiment");
  auto* fiedler = app.add_subcommand("fiedler", "Per-layer algebraic connectivity");
  add_common(fiedler, o, false);
  auto* eigs = app.add_subcommand("eigs", "Spectrum of the coupled Jacobian");
  add_common(eigs, o, false);
  auto* theorem = app.add_subcommand("theorem", "Sufficient conditions (a) and (b)");
  add_common(theorem, o, false);
  theorem->add_flag("--sweep", o.sweep, "Report tau for c = 1e-2 .. 1e-8");
  auto* simulate = app.add_subcommand("simulate", "Seeded perturbation experiment");
  add_common(simulate, o, false);
  auto* threshold = app.add_subcommand("threshold", "Weight scale where the abscissa crosses 0");
  add_common(threshold, o, false);
  auto* demo = app.add_subcommand("demo", "Reproduce a bundled example (example1|example2)");
  add_common(demo, o, false);
  demo->add_option("--set", o.set, "Dispersal set (1 or 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kExitUsage;
  }

  try {
    if (!o.bracket.empty() && !(o.bracket[0] < o.bracket[1])) {
      throw CLI::ValidationError("--bracket", "LO must be less than HI");
    }
    if (*analyze) return cmd_analyze(o);
    if (*fiedler) return cmd_fiedler(o);
    if (*eigs) return cmd_eigs(o);
    if (*theorem) return cmd_theorem(o);
    if (*simulate) return cmd_simulate(o);
    if (*threshold) return cmd_threshold(o);
    if (*demo) return cmd_demo(o);
  } catch (const CLI::Error& e) {
    fmt::print(stderr, "netstab: usage error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "netstab: error: {}\n", e.what());
    return kExitError;
  }
  return kExitUsage;
}
