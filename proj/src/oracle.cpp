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

#include "remedy/oracle.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "remedy/objectives.hpp"

namespace remedy {

void OracleLimits::validate() const {
  if (max_content > kOracleHardCap) {
    throw Error("invalid_config",
                fmt::format("oracle max_content {} exceeds the hard cap {}",
                            max_content, kOracleHardCap));
  }
}

OracleResult solve_exact(const LearnerState& learner,
                         std::span<const std::size_t> candidates,
                         std::span<const ContentItem> content,
                         const PrereqGraph& prereqs, const OracleOptions& options) {
  options.limits.validate();
  if (candidates.size() > options.limits.max_content) {
    throw Error("pool_too_large",
                fmt::format("oracle pool of {} exceeds max_content {}", candidates.size(),
                            options.limits.max_content));
  }
  std::vector<std::size_t> ids(candidates.begin(), candidates.end());
  std::sort(ids.begin(), ids.end());
  const auto pairs = similar_pairs(ids, content, options.similarity);

  OracleResult best;
  bool have = false;
  std::vector<std::size_t> subset;
  double minutes = 0;

  auto consider = [&]() {
    if (!prerequisite_ok(subset, learner, prereqs, content)) return;
    for (const auto& [a, b] : pairs) {
      const bool has_a = std::find(subset.begin(), subset.end(), a) != subset.end();
      const bool has_b = std::find(subset.begin(), subset.end(), b) != subset.end();
      if (has_a && has_b) return;
    }
    if (!diversity_ok(subset, options.min_forms, content).ok) return;
    ++best.feasible_subsets;
    const double capped = slate_capped_coverage(learner, subset, content);
    const double value = options.objective == OracleObjective::kCappedCoverage
                             ? capped
                             : slate_objective(learner, subset, content, options.weights);
    const bool better =
        !have || value > best.value + 1e-12 ||
        (std::abs(value - best.value) <= 1e-12 &&
         std::lexicographical_compare(subset.begin(), subset.end(), best.selected.begin(),
                                      best.selected.end()));
    if (better) {
      have = true;
      best.selected = subset;
      best.value = value;
      best.capped = capped;
    }
  };

  // Inclusion-ordered walk; a branch dies as soon as a budget is exceeded.
  auto walk = [&](auto&& self, std::size_t t) -> void {
    if (t == ids.size()) {
      consider();
      return;
    }
    const auto& item = content[ids[t]];
    if (minutes + item.duration_minutes <= learner.time_budget() &&
        subset.size() + 1 <= learner.slate_cap()) {
      subset.push_back(ids[t]);
      minutes += item.duration_minutes;
      self(self, t + 1);
      minutes -= item.duration_minutes;
      subset.pop_back();
    }
    self(self, t + 1);
  };
  walk(walk, 0);
  return best;
}

OracleResult solve_exact(const LearnerState& learner, const AdmissiblePool& pool,
                         std::span<const ContentItem> content,
                         const PrereqGraph& prereqs, const OracleOptions& options) {
  return solve_exact(learner, pool.admissible_ids, content, prereqs, options);
}

AssignmentSlate oracle_slate(const LearnerState& learner, const OracleResult& result,
                             std::span<const ContentItem> content) {
  AssignmentSlate slate;
  slate.learner_id = learner.id();
  slate.solver = "oracle";
  slate.selected = result.selected;
  BinaryVector open = learner.gaps();
  for (std::size_t j : slate.selected) {
    TraceEntry e{"pick", j, content[j].id, {}, result.value,
                 level_distance(content[j].level, learner.preferred()), "exact"};
    for (std::size_t k = 0; k < learner.skills(); ++k) {
      if (open[k] && content[j].coverage[k]) {
        e.skills.push_back(k);
        open[k] = 0;
      }
    }
    slate.trace.push_back(std::move(e));
  }
  refresh_slate(slate, learner, content);
  slate.rationale = "exact enumeration";
  return slate;
}

}  // namespace remedy
