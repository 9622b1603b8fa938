#!/usr/bin/env python3
"""Regenerate include/netstab/builtin_scenarios.hpp from scenarios/example*.json."""

import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
files = sorted((ROOT / "scenarios").glob("example*.json"))

out = [
    "// Generated from scenarios/*.json; tests check the two stay identical.",
    "#pragma once",
    "",
    "#include <array>",
    "#include <optional>",
    "#include <string_view>",
    "",
    "namespace netstab {",
    "",
    "struct BuiltinScenario {",
    "  std::string_view name;",
    "  std::string_view json;",
    "};",
    "",
    f"inline constexpr std::array<BuiltinScenario, {len(files)}> kBuiltinScenarios{{{{",
]
for f in files:
    out.append(f'    {{"{f.stem}", R"json({f.read_text()})json"}},')
out += [
    "}};",
    "",
    "[[nodiscard]] constexpr std::optional<std::string_view> builtin_scenario(std::string_view name) {",
    "  for (const auto& b : kBuiltinScenarios)",
    "    if (b.name == name) return b.json;",
    "  return std::nullopt;",
    "}",
    "",
    "}  // namespace netstab",
]
(ROOT / "include/netstab/builtin_scenarios.hpp").write_text("\n".join(out) + "\n")
