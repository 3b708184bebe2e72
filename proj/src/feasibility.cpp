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

#include "remedy/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <fmt/format.h>

namespace remedy {

std::string_view to_string(ExclusionReason reason) noexcept {
  switch (reason) {
    case ExclusionReason::kDifficultyWindow:
      return "difficulty_window";
    case ExclusionReason::kOverlong:
      return "overlong";
    case ExclusionReason::kPrerequisite:
      return "prerequisite";
    case ExclusionReason::kDuplicate:
      return "duplicate";
  }
  return "difficulty_window";
}

double jaccard(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw DimensionError("skills", a.size(), b.size());
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    inter += (a[k] && b[k]) ? 1 : 0;
    uni += (a[k] || b[k]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void SimilarityPolicy::validate() const {
  if (!(threshold > 0 && threshold <= 1)) {
    throw Error("invalid_config", "similarity threshold must lie in (0, 1]");
  }
}

bool SimilarityPolicy::similar(const ContentItem& a, const ContentItem& b) const {
  return jaccard(a.coverage, b.coverage) >= threshold;
}

std::vector<ContentPair> similar_pairs(std::span<const std::size_t> ids,
                                       std::span<const ContentItem> content,
                                       const SimilarityPolicy& policy) {
  std::vector<ContentPair> pairs;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      if (policy.similar(content[ids[a]], content[ids[b]])) {
        pairs.emplace_back(std::min(ids[a], ids[b]), std::max(ids[a], ids[b]));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

AdmissiblePool build_pool(const LearnerState& learner,
                          std::span<const ContentItem> content,
                          const PrereqGraph& prereqs,
                          const SimilarityPolicy& similarity) {
  return build_pool(learner, content, prereqs, similarity, learner.window());
}

AdmissiblePool build_pool(const LearnerState& learner,
                          std::span<const ContentItem> content,
                          const PrereqGraph& prereqs,
                          const SimilarityPolicy& similarity,
                          DifficultyWindow window) {
  similarity.validate();
  const std::size_t skills = learner.skills();
  AdmissiblePool pool;
  pool.learner_id = learner.id();
  pool.window = window;

  std::vector<std::optional<ExclusionReason>> reason(content.size());
  for (std::size_t j = 0; j < content.size(); ++j) {
    if (content[j].coverage.size() != skills) {
      throw DimensionError("skills", skills, content[j].coverage.size());
    }
    if (!window.contains(content[j].difficulty_index)) {
      reason[j] = ExclusionReason::kDifficultyWindow;
    } else if (content[j].duration_minutes > learner.time_budget()) {
      reason[j] = ExclusionReason::kOverlong;
    }
  }

  // Union-find over similar pairs; each connected group keeps its shortest
  // item.
  auto better = [&](std::size_t a, std::size_t b) {
    const double la = content[a].duration_minutes;
    const double lb = content[b].duration_minutes;
    return la < lb || (la == lb && a < b);
  };
  auto dedupe = [&] {
    pool.admissible_ids.clear();
    for (std::size_t j = 0; j < content.size(); ++j) {
      if (reason[j] == ExclusionReason::kDuplicate) reason[j].reset();
      if (!reason[j]) pool.admissible_ids.push_back(j);
    }
    pool.similar = similar_pairs(pool.admissible_ids, content, similarity);
    std::vector<std::size_t> parent(content.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [a, b] : pool.similar) {
      const std::size_t ra = find(a);
      const std::size_t rb = find(b);
      if (ra == rb) continue;
      if (better(ra, rb)) {
        parent[rb] = ra;
      } else {
        parent[ra] = rb;
      }
    }
    pool.nonredundant_ids.clear();
    for (std::size_t j : pool.admissible_ids) {
      if (find(j) == j) {
        pool.nonredundant_ids.push_back(j);
      } else {
        reason[j] = ExclusionReason::kDuplicate;
      }
    }
  };

  // Static prerequisite screen: an item touching k' is unusable when some
  // prerequisite k of k' is unmastered and no surviving item covers k.
  // Screening and deduplication feed each other, so repeat both until
  // neither changes anything; the result is then stable under a rebuild.
  dedupe();
  bool changed = !prereqs.empty();
  while (changed) {
    changed = false;
    BinaryVector reachable(skills, 0);
    for (std::size_t j : pool.nonredundant_ids) {
      for (std::size_t k = 0; k < skills; ++k) {
        if (content[j].coverage[k]) reachable[k] = 1;
      }
    }
    for (std::size_t j = 0; j < content.size(); ++j) {
      if (reason[j] && reason[j] != ExclusionReason::kDuplicate) continue;
      for (const auto& [from, to] : prereqs.edges()) {
        if (content[j].coverage[to] && !learner.mastery()[from] && !reachable[from]) {
          reason[j] = ExclusionReason::kPrerequisite;
          changed = true;
          break;
        }
      }
    }
    if (changed) dedupe();
  }
  for (std::size_t j = 0; j < content.size(); ++j) {
    if (reason[j]) pool.excluded.push_back({j, *reason[j]});
  }
  return pool;
}

bool prerequisite_ok(std::span<const std::size_t> slate,
                     const LearnerState& learner, const PrereqGraph& prereqs,
                     std::span<const ContentItem> content) {
  if (prereqs.empty() || slate.empty()) return true;
  std::vector<int> count(learner.skills(), 0);
  for (std::size_t j : slate) {
    for (std::size_t k = 0; k < learner.skills(); ++k) count[k] += content[j].coverage[k];
  }
  for (const auto& [from, to] : prereqs.edges()) {
    if (count[to] > static_cast<int>(learner.mastery()[from]) + count[from]) {
      return false;
    }
  }
  return true;
}

DiversityCheck diversity_ok(std::span<const std::size_t> slate,
                            std::size_t delta,
                            std::span<const ContentItem> content) {
  if (delta < 1) throw Error("invalid_config", "diversity delta must be >= 1");
  if (slate.empty()) return {};
  std::size_t forms = 0;
  for (const auto& item : content) forms = std::max(forms, item.tags.size());
  if (delta > std::max<std::size_t>(forms, 1)) {
    return {false, fmt::format("diversity delta {} exceeds the {} available "
                               "representation forms",
                               delta, forms)};
  }
  BinaryVector used(forms, 0);
  bool any_tagged = false;
  for (std::size_t j : slate) {
    for (std::size_t r = 0; r < content[j].tags.size(); ++r) {
      if (content[j].tags[r]) {
        used[r] = 1;
        any_tagged = true;
      }
    }
  }
  if (delta == 1 && !any_tagged) return {};
  const auto distinct = static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));
  return {distinct >= delta, {}};
}

void RichnessWeights::validate() const {
  double total = 0;
  for (double v : w) {
    if (v < 0) throw Error("invalid_config", "richness weights must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error("invalid_config", "richness weights must sum to 1");
  }
}

RichnessScore richness(const LearnerState& learner, const AdmissiblePool& pool,
                       std::span<const ContentItem> content,
                       const RichnessWeights& weights) {
  weights.validate();
  RichnessScore score;
  score.weights = weights;
  const std::size_t skills = learner.skills();
  if (learner.gap_count() == 0) {
    score.no_gaps = true;
    score.composite = 1.0;
    return score;
  }

  std::size_t reachable = 0;
  std::vector<double> counts;
  for (std::size_t k = 0; k < skills; ++k) {
    if (!learner.has_gap(k)) continue;
    const bool any = std::any_of(
        pool.admissible_ids.begin(), pool.admissible_ids.end(),
        [&](std::size_t j) { return content[j].covers(k); });
    reachable += any ? 1 : 0;
    counts.push_back(static_cast<double>(std::count_if(
        pool.nonredundant_ids.begin(), pool.nonredundant_ids.end(),
        [&](std::size_t j) { return content[j].covers(k); })));
  }
  score.breadth = static_cast<double>(reachable) / static_cast<double>(counts.size());
  std::sort(counts.begin(), counts.end());
  const std::size_t m = counts.size();
  const double median =
      m % 2 ? counts[m / 2] : 0.5 * (counts[m / 2 - 1] + counts[m / 2]);
  score.median_count = median / (1.0 + median);

  std::size_t forms = 0;
  for (std::size_t j : pool.nonredundant_ids) {
    forms = std::max(forms, content[j].tags.size());
  }
  if (forms > 1) {
    std::vector<double> mass(forms, 0.0);
    double total = 0;
    for (std::size_t j : pool.nonredundant_ids) {
      for (std::size_t r = 0; r < content[j].tags.size(); ++r) {
        mass[r] += content[j].tags[r];
        total += content[j].tags[r];
      }
    }
    if (total > 0) {
      double h = 0;
      for (double v : mass) {
        if (v > 0) h -= (v / total) * std::log(v / total);
      }
      score.representation_entropy = h / std::log(static_cast<double>(forms));
    }
  }

  const double half_width = 0.5 * (encode(pool.window.upper) - encode(pool.window.lower));
  if (half_width > 0 && !pool.nonredundant_ids.empty()) {
    double mean = 0;
    for (std::size_t j : pool.nonredundant_ids) mean += content[j].difficulty_index;
    mean /= static_cast<double>(pool.nonredundant_ids.size());
    double var = 0;
    for (std::size_t j : pool.nonredundant_ids) {
      const double d = content[j].difficulty_index - mean;
      var += d * d;
    }
    var /= static_cast<double>(pool.nonredundant_ids.size());
    score.difficulty_spread = std::min(1.0, std::sqrt(var) / half_width);
  }

  score.composite = weights.w[0] * score.breadth +
                    weights.w[1] * score.median_count +
                    weights.w[2] * score.representation_entropy +
                    weights.w[3] * score.difficulty_spread;
  return score;
}

std::vector<UncoverablePair> infeasibility_certificate(
    std::span<const LearnerState> learners,
    std::span<const AdmissiblePool> pools,
    std::span<const ContentItem> content) {
  if (learners.size() != pools.size()) {
    throw DimensionError("learners", learners.size(), pools.size());
  }
  std::vector<UncoverablePair> out;
  for (std::size_t i = 0; i < learners.size(); ++i) {
    for (std::size_t k = 0; k < learners[i].skills(); ++k) {
      if (!learners[i].has_gap(k)) continue;
      const bool any = std::any_of(
          pools[i].admissible_ids.begin(), pools[i].admissible_ids.end(),
          [&](std::size_t j) { return content[j].covers(k); });
      if (!any) out.push_back({learners[i].id(), k});
    }
  }
  return out;
}

}  // namespace remedy
