// Copyright 2026 The Remedy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "remedy/pipeline.hpp"

namespace {

using remedy::fs::path;
using nlohmann::json;

struct Options {
  std::optional<path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::optional<std::size_t> threads;
  path out = ".";
  remedy::CommandInputs in;
};

void emit_error(std::string_view code, std::string_view message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
}

// Seed precedence: --seed, then the config file, then REMEDY_SEED, then 0.
remedy::RunConfig resolve_config(const Options& o) {
  json doc = o.config ? remedy::read_json(*o.config) : json::object();
  if (!doc.is_object()) throw remedy::Error("invalid_config", "config must be a JSON object");
  if (o.seed) {
    doc["seed"] = *o.seed;
  } else if (!doc.contains("seed")) {
    if (const char* env = std::getenv("REMEDY_SEED")) {
      std::uint64_t v = 0;
      const std::string_view s(env);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw remedy::Error("invalid_config", "REMEDY_SEED must be a nonnegative integer");
      }
      doc["seed"] = v;
    }
  }
  if (o.solver) doc["solver"] = *o.solver;
  if (o.threads) doc["threads"] = *o.threads;
  return remedy::config_from_json(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Remedial content assignment toolkit"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--seed", o.seed, "Overrides the configured seed");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  };
  auto add_path = [](CLI::App* cmd, const char* flag, std::optional<path>& target,
                     const char* help) { cmd->add_option(flag, target, help); };

  auto* synth_cohort = app.add_subcommand("synth-cohort", "Generate a synthetic cohort");
  common(synth_cohort);
  auto* synth_content = app.add_subcommand("synth-content", "Generate a content pool");
  common(synth_content);

  auto* diagnose = app.add_subcommand("diagnose", "Fit DINA and estimate abilities");
  common(diagnose);
  add_path(diagnose, "--responses", o.in.responses, "Response matrix CSV");
  add_path(diagnose, "--qmatrix", o.in.qmatrix, "Q-matrix CSV");
  add_path(diagnose, "--items", o.in.items, "Item parameter CSV");

  auto* cat = app.add_subcommand("cat-sim", "Simulate adaptive testing");
  common(cat);
  add_path(cat, "--items", o.in.items, "Item parameter CSV");
  add_path(cat, "--learners", o.in.learners, "Learners CSV with true abilities");

  auto* assign = app.add_subcommand("assign", "Assign content slates");
  common(assign);
  assign->add_option("--solver", o.solver, "greedy | gd | hybrid | auto");
  assign->add_flag("--gd-trace", o.in.gd_trace,
                   "Write per-iteration loss and gradient norm for gd solves");
  for (auto* cmd : {assign, app.add_subcommand("evaluate", "Score slates"),
                    app.add_subcommand("oracle", "Exact search on small instances")}) {
    if (cmd != assign) common(cmd);
    add_path(cmd, "--content", o.in.content, "Content CSV");
    add_path(cmd, "--learners", o.in.learners, "Learners CSV");
    add_path(cmd, "--prereqs", o.in.prereqs, "Prerequisite edges CSV");
  }
  auto* evaluate = app.get_subcommand("evaluate");
  add_path(evaluate, "--slates", o.in.slates, "slates.json from assign");
  auto* oracle = app.get_subcommand("oracle");

  auto* compare = app.add_subcommand("compare", "Sweep pool sizes for both solvers");
  common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto config = resolve_config(o);
    remedy::Artifacts files;
    if (*synth_cohort) files = remedy::run_synth_cohort(config, o.out);
    if (*synth_content) files = remedy::run_synth_content(config, o.out);
    if (*diagnose) files = remedy::run_diagnose(config, o.in, o.out);
    if (*cat) files = remedy::run_cat_sim(config, o.in, o.out);
    if (*assign) files = remedy::run_assign(config, o.in, o.out);
    if (*evaluate) files = remedy::run_evaluate(config, o.in, o.out);
    if (*compare) files = remedy::run_compare(config, o.out);
    if (*oracle) files = remedy::run_oracle(config, o.in, o.out);
    for (const auto& f : files) std::cout << f.string() << '\n';
  } catch (const remedy::Error& e) {
    emit_error(e.code(), e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 3;
  }
  return 0;
}
