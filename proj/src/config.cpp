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

#include "remedy/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace remedy {

using nlohmann::json;

Level WindowPolicy::preferred(double theta) const {
  if (theta < basic_below) return Level::kBasic;
  if (theta > hard_above) return Level::kHard;
  return Level::kMedium;
}

DifficultyWindow widen(DifficultyWindow w, int levels) {
  return {level_from_index(std::max(0, encode(w.lower) - levels)),
          level_from_index(std::min(2, encode(w.upper) + levels))};
}

DifficultyWindow WindowPolicy::window(Level preferred) const {
  return widen({preferred, preferred}, radius);
}

void WindowPolicy::validate() const {
  if (basic_below > hard_above) {
    throw Error("invalid_config", "window.basic_below must not exceed window.hard_above");
  }
  if (radius < 0 || radius > 2) throw Error("invalid_config", "window.radius must lie in 0..2");
}

GreedyConfig RunConfig::greedy_config() const {
  GreedyConfig g = greedy;
  g.weights = weights;
  return g;
}

GradientConfig RunConfig::gradient_config() const {
  GradientConfig g = gradient;
  g.alpha = weights.alpha;
  g.beta = weights.beta;
  g.epsilon = weights.epsilon;
  g.omega = weights.omega;
  return g;
}

void RunConfig::validate() const {
  if (solver != "greedy" && solver != "gd" && solver != "hybrid" && solver != "auto") {
    throw Error("invalid_config", fmt::format("unknown solver '{}'", solver));
  }
  policy.validate();
  weights.validate(content.n_skills);
  greedy_config().validate();
  gradient_config().validate();
  similarity.validate();
  if (diversity_min_forms < 1) throw Error("invalid_config", "diversity_min_forms must be >= 1");
  richness.validate();
  cat.validate();
  window.validate();
  if (!(budgets.time_budget_min > 0)) {
    throw Error("invalid_config", "budgets.time_budget_min must be positive");
  }
  cohort.validate();
  content.validate();
  if (cohort.n_skills != content.n_skills) {
    throw Error("invalid_config", "cohort.n_skills and content.n_skills must agree");
  }
  if (compare.pool_sizes.empty()) throw Error("invalid_config", "compare.pool_sizes is empty");
  if (compare.time_budget_min < 0) {
    throw Error("invalid_config", "compare.time_budget_min must be >= 0");
  }
  if (penalty_w1 < 0 || penalty_w2 < 0) {
    throw Error("invalid_config", "penalty weights must be >= 0");
  }
}

namespace {

// Reads known keys out of one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) {
      throw Error("invalid_config", fmt::format("'{}' must be an object", where_));
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error("invalid_config", fmt::format("{}.{}: {}", where_, key, e.what()));
    }
  }

  // null stands for +infinity.
  void get_unbounded(const char* key, double& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    if (doc_.at(key).is_null()) {
      out = std::numeric_limits<double>::infinity();
      return;
    }
    get(key, out);
  }

  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(doc_.contains(key) ? doc_.at(key) : empty,
                   where_.empty() ? key : where_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) {
        throw Error("unknown_config_key",
                    fmt::format("unknown config key '{}{}'",
                                where_.empty() ? "" : where_ + ".", key));
      }
    }
  }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

json unbounded(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

std::string surrogate_name(CoverageSurrogate s) {
  return s == CoverageSurrogate::kHinge ? "hinge" : "exponential";
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["solver"] = c.solver;
  j["policy"] = {{"rho_star", c.policy.rho_star},
                 {"lambda_budget_ms", unbounded(c.policy.lambda_budget_ms)},
                 {"lambda_star_ms", c.policy.lambda_star_ms},
                 {"mode", std::string(to_string(c.policy.mode))},
                 {"cohort_median", c.policy.cohort_median}};
  const auto& w = c.weights;
  j["weights"] = {{"alpha", w.alpha},   {"beta", w.beta},
                  {"epsilon", w.epsilon}, {"omega", w.omega},
                  {"gamma_overlap", w.gamma_overlap}, {"gamma_slack", w.gamma_slack}};
  j["greedy"] = {{"fallback_enabled", c.greedy.fallback_enabled},
                 {"max_iterations", c.greedy.max_iterations},
                 {"knapsack_safeguard", c.greedy.knapsack_safeguard},
                 {"safeguard_seed_size", c.greedy.safeguard_seed_size},
                 {"safeguard_max_seeds", c.greedy.safeguard_max_seeds}};
  const auto& g = c.gradient;
  j["gradient"] = {{"tau_cov", g.tau_cov},
                   {"lambda_time", g.lambda_time},
                   {"lambda_card", g.lambda_card},
                   {"lambda_diff", g.lambda_diff},
                   {"lambda_pre", g.lambda_pre},
                   {"lambda_div", g.lambda_div},
                   {"eta_step", g.eta_step},
                   {"grad_tol", g.grad_tol},
                   {"max_iters", g.max_iters},
                   {"round_threshold", g.round_threshold},
                   {"surrogate", surrogate_name(g.surrogate)},
                   {"window_tolerance", g.window_tolerance},
                   {"coverage_rescue", g.coverage_rescue}};
  j["similarity"] = {{"threshold", c.similarity.threshold}};
  j["diversity_min_forms"] = c.diversity_min_forms;
  j["richness_weights"] = c.richness.w;
  j["cat"] = {{"se_threshold", c.cat.se_threshold},
              {"max_items", c.cat.max_items},
              {"grid_lower", c.cat.grid.lower},
              {"grid_upper", c.cat.grid.upper},
              {"grid_points", c.cat.grid.points}};
  j["em"] = {{"tolerance", c.em.tolerance},
             {"max_iterations", c.em.max_iterations},
             {"initial_slip", c.em.initial_slip},
             {"initial_guess", c.em.initial_guess},
             {"clamp_low", c.em.clamp_low},
             {"clamp_high", c.em.clamp_high}};
  j["window"] = {{"basic_below", c.window.basic_below},
                 {"hard_above", c.window.hard_above},
                 {"radius", c.window.radius}};
  j["budgets"] = {{"time_budget_min", c.budgets.time_budget_min},
                  {"slate_cap", c.budgets.slate_cap}};
  const auto& h = c.cohort;
  j["cohort"] = {{"n_students", h.n_students},
                 {"n_items", h.n_items},
                 {"n_skills", h.n_skills},
                 {"mastery_rate", h.mastery_rate},
                 {"guess_alpha", h.guess_alpha},
                 {"guess_beta", h.guess_beta},
                 {"slip_alpha", h.slip_alpha},
                 {"slip_beta", h.slip_beta},
                 {"single_skill_item_fraction", h.single_skill_item_fraction},
                 {"irt_a_min", h.irt_a_min},
                 {"irt_a_max", h.irt_a_max},
                 {"irt_b_sd", h.irt_b_sd},
                 {"irt_c_max", h.irt_c_max}};
  const auto& p = c.content;
  j["content"] = {{"n_content", p.n_content},
                  {"n_skills", p.n_skills},
                  {"duration_mu", p.duration_mu},
                  {"duration_sigma", p.duration_sigma},
                  {"duration_min", p.duration_min},
                  {"duration_max", p.duration_max},
                  {"level_mix", p.level_mix},
                  {"single_skill_fraction", p.single_skill_fraction},
                  {"full_coverage", p.full_coverage},
                  {"n_forms", p.n_forms}};
  j["compare"] = {{"pool_sizes", c.compare.pool_sizes},
                  {"time_budget_min", c.compare.time_budget_min}};
  j["penalty_w1"] = c.penalty_w1;
  j["penalty_w2"] = c.penalty_w2;
  j["threads"] = c.threads;
  return j;
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  Section root(doc, "");
  root.get("seed", c.seed);
  root.get("solver", c.solver);
  {
    auto s = root.child("policy");
    s.get("rho_star", c.policy.rho_star);
    s.get_unbounded("lambda_budget_ms", c.policy.lambda_budget_ms);
    s.get("lambda_star_ms", c.policy.lambda_star_ms);
    std::string mode(to_string(c.policy.mode));
    s.get("mode", mode);
    c.policy.mode = parse_policy_mode(mode);
    s.get("cohort_median", c.policy.cohort_median);
    s.finish();
  }
  {
    auto s = root.child("weights");
    s.get("alpha", c.weights.alpha);
    s.get("beta", c.weights.beta);
    s.get("epsilon", c.weights.epsilon);
    s.get("omega", c.weights.omega);
    s.get("gamma_overlap", c.weights.gamma_overlap);
    s.get("gamma_slack", c.weights.gamma_slack);
    s.finish();
  }
  {
    auto s = root.child("greedy");
    s.get("fallback_enabled", c.greedy.fallback_enabled);
    s.get("max_iterations", c.greedy.max_iterations);
    s.get("knapsack_safeguard", c.greedy.knapsack_safeguard);
    s.get("safeguard_seed_size", c.greedy.safeguard_seed_size);
    s.get("safeguard_max_seeds", c.greedy.safeguard_max_seeds);
    s.finish();
  }
  {
    auto s = root.child("gradient");
    auto& g = c.gradient;
    s.get("tau_cov", g.tau_cov);
    s.get("lambda_time", g.lambda_time);
    s.get("lambda_card", g.lambda_card);
    s.get("lambda_diff", g.lambda_diff);
    s.get("lambda_pre", g.lambda_pre);
    s.get("lambda_div", g.lambda_div);
    s.get("eta_step", g.eta_step);
    s.get("grad_tol", g.grad_tol);
    s.get("max_iters", g.max_iters);
    s.get("round_threshold", g.round_threshold);
    std::string surrogate = surrogate_name(g.surrogate);
    s.get("surrogate", surrogate);
    if (surrogate == "hinge") {
      g.surrogate = CoverageSurrogate::kHinge;
    } else if (surrogate == "exponential") {
      g.surrogate = CoverageSurrogate::kExponential;
    } else {
      throw Error("invalid_config", fmt::format("unknown surrogate '{}'", surrogate));
    }
    s.get("window_tolerance", g.window_tolerance);
    s.get("coverage_rescue", g.coverage_rescue);
    s.finish();
  }
  {
    auto s = root.child("similarity");
    s.get("threshold", c.similarity.threshold);
    s.finish();
  }
  root.get("diversity_min_forms", c.diversity_min_forms);
  root.get("richness_weights", c.richness.w);
  {
    auto s = root.child("cat");
    s.get("se_threshold", c.cat.se_threshold);
    s.get("max_items", c.cat.max_items);
    s.get("grid_lower", c.cat.grid.lower);
    s.get("grid_upper", c.cat.grid.upper);
    s.get("grid_points", c.cat.grid.points);
    s.finish();
  }
  {
    auto s = root.child("em");
    s.get("tolerance", c.em.tolerance);
    s.get("max_iterations", c.em.max_iterations);
    s.get("initial_slip", c.em.initial_slip);
    s.get("initial_guess", c.em.initial_guess);
    s.get("clamp_low", c.em.clamp_low);
    s.get("clamp_high", c.em.clamp_high);
    s.finish();
  }
  {
    auto s = root.child("window");
    s.get("basic_below", c.window.basic_below);
    s.get("hard_above", c.window.hard_above);
    s.get("radius", c.window.radius);
    s.finish();
  }
  {
    auto s = root.child("budgets");
    s.get("time_budget_min", c.budgets.time_budget_min);
    s.get("slate_cap", c.budgets.slate_cap);
    s.finish();
  }
  {
    auto s = root.child("cohort");
    auto& h = c.cohort;
    s.get("n_students", h.n_students);
    s.get("n_items", h.n_items);
    s.get("n_skills", h.n_skills);
    s.get("mastery_rate", h.mastery_rate);
    s.get("guess_alpha", h.guess_alpha);
    s.get("guess_beta", h.guess_beta);
    s.get("slip_alpha", h.slip_alpha);
    s.get("slip_beta", h.slip_beta);
    s.get("single_skill_item_fraction", h.single_skill_item_fraction);
    s.get("irt_a_min", h.irt_a_min);
    s.get("irt_a_max", h.irt_a_max);
    s.get("irt_b_sd", h.irt_b_sd);
    s.get("irt_c_max", h.irt_c_max);
    s.finish();
  }
  {
    auto s = root.child("content");
    auto& p = c.content;
    s.get("n_content", p.n_content);
    s.get("n_skills", p.n_skills);
    s.get("duration_mu", p.duration_mu);
    s.get("duration_sigma", p.duration_sigma);
    s.get("duration_min", p.duration_min);
    s.get("duration_max", p.duration_max);
    s.get("level_mix", p.level_mix);
    s.get("single_skill_fraction", p.single_skill_fraction);
    s.get("full_coverage", p.full_coverage);
    s.get("n_forms", p.n_forms);
    s.finish();
  }
  {
    auto s = root.child("compare");
    s.get("pool_sizes", c.compare.pool_sizes);
    s.get("time_budget_min", c.compare.time_budget_min);
    s.finish();
  }
  root.get("penalty_w1", c.penalty_w1);
  root.get("penalty_w2", c.penalty_w2);
  root.get("threads", c.threads);
  root.finish();
  c.cohort.seed = c.seed;
  c.content.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("invalid_config",
                fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return config_from_json(doc);
}

std::string config_hash(const RunConfig& config) {
  // Thread count cannot change any output, so it stays out of the hash.
  auto doc = to_json(config);
  doc.erase("threads");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace remedy
