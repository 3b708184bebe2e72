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

// Run configuration: one JSON document, validated on load, unknown keys
// rejected. The canonical dump is hashed into every output artifact.

#ifndef REMEDY_CONFIG_HPP_
#define REMEDY_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "remedy/feasibility.hpp"
#include "remedy/gradient.hpp"
#include "remedy/greedy.hpp"
#include "remedy/hybrid.hpp"
#include "remedy/psychometrics.hpp"
#include "remedy/synth.hpp"

namespace remedy {

// Maps ability to a preferred level and a symmetric difficulty window.
struct WindowPolicy {
  double basic_below = -0.5;
  double hard_above = 0.5;
  int radius = 0;

  Level preferred(double theta) const;
  DifficultyWindow window(Level preferred) const;
  void validate() const;
};

// Widens `w` by `levels` on both sides, clipped to the scale.
DifficultyWindow widen(DifficultyWindow w, int levels);

struct BudgetDefaults {
  double time_budget_min = 45.0;
  std::size_t slate_cap = 0;  // 0 means the pool size
};

struct CompareConfig {
  std::vector<std::size_t> pool_sizes{5, 10, 15, 20};
  // 0 derives a non-binding budget: n_skills * longest possible item.
  double time_budget_min = 0.0;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string solver = "greedy";  // greedy | gd | hybrid | auto
  RegimePolicy policy;
  ObjectiveWeights weights;
  GreedyConfig greedy;      // its weights are taken from `weights`
  GradientConfig gradient;  // alpha/beta/epsilon/omega taken from `weights`
  SimilarityPolicy similarity;
  std::size_t diversity_min_forms = 1;
  RichnessWeights richness;
  CatConfig cat;
  EmConfig em;
  WindowPolicy window;
  BudgetDefaults budgets;
  CohortSpec cohort;
  ContentPoolSpec content;
  CompareConfig compare;
  double penalty_w1 = 1.0;
  double penalty_w2 = 1.0;
  std::size_t threads = 0;  // 0 uses the hardware concurrency

  GreedyConfig greedy_config() const;
  GradientConfig gradient_config() const;
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
// Missing keys keep their defaults; unknown keys raise Error.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// FNV-1a over the canonical JSON dump without `threads`, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace remedy

#endif  // REMEDY_CONFIG_HPP_
