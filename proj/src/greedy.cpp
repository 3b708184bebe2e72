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

#include "remedy/greedy.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "remedy/objectives.hpp"

namespace remedy {
namespace {

std::size_t count_overlap(std::span<const std::uint8_t> mask,
                          const ContentItem& item) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) n += (mask[k] && item.coverage[k]) ? 1 : 0;
  return n;
}

std::vector<std::size_t> newly_covered(std::span<const std::uint8_t> uncovered,
                                       const ContentItem& item) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < uncovered.size(); ++k) {
    if (uncovered[k] && item.coverage[k]) out.push_back(k);
  }
  return out;
}

// Incremental state shared by the main loop and the safeguard.
struct PartialSlate {
  std::vector<std::size_t> picks;
  BinaryVector uncovered;
  BinaryVector covered;
  double minutes = 0;

  explicit PartialSlate(const LearnerState& learner)
      : uncovered(learner.gaps()), covered(learner.skills(), 0) {}

  bool fits(const ContentItem& item, const LearnerState& learner) const {
    return minutes + item.duration_minutes <= learner.time_budget() &&
           picks.size() + 1 <= learner.slate_cap();
  }

  bool prereq_ok_with(std::size_t j, const LearnerState& learner,
                      const PrereqGraph& prereqs,
                      std::span<const ContentItem> content) const {
    if (prereqs.empty()) return true;
    std::vector<std::size_t> trial = picks;
    trial.push_back(j);
    return prerequisite_ok(trial, learner, prereqs, content);
  }

  void add(std::size_t j, const ContentItem& item) {
    picks.push_back(j);
    minutes += item.duration_minutes;
    for (std::size_t k = 0; k < uncovered.size(); ++k) {
      if (item.coverage[k]) {
        uncovered[k] = 0;
        covered[k] = 1;
      }
    }
  }

  std::size_t open_gaps() const {
    return static_cast<std::size_t>(std::count(uncovered.begin(), uncovered.end(), 1));
  }
};

int pick_tier(const ContentItem& item, const LearnerState& learner,
              bool fallback) {
  return fallback ? level_distance(item.level, learner.preferred()) : 0;
}

// Completes `state` by coverage-per-minute, ties to the lowest index.
void complete_by_ratio(PartialSlate& state, std::span<const std::size_t> candidates,
                       const LearnerState& learner, const PrereqGraph& prereqs,
                       std::span<const ContentItem> content) {
  while (state.open_gaps() > 0) {
    std::optional<std::size_t> best;
    double best_ratio = -1;
    for (std::size_t j : candidates) {
      const auto& item = content[j];
      const std::size_t gain = count_overlap(state.uncovered, item);
      if (gain == 0 || !state.fits(item, learner)) continue;
      if (!state.prereq_ok_with(j, learner, prereqs, content)) continue;
      const double ratio = static_cast<double>(gain) / item.duration_minutes;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = j;
      }
    }
    if (!best) return;
    state.add(*best, content[*best]);
  }
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Best capped coverage over seeds of size <= s, each completed greedily.
std::optional<PartialSlate> partial_enumeration(
    const LearnerState& learner, std::span<const std::size_t> candidates,
    const PrereqGraph& prereqs, std::span<const ContentItem> content,
    const GreedyConfig& config) {
  std::size_t s = std::min(config.safeguard_seed_size, candidates.size());
  while (s > 1 && binomial(candidates.size(), s) > config.safeguard_max_seeds) --s;

  std::optional<PartialSlate> best;
  std::size_t best_open = learner.gap_count() + 1;
  std::vector<std::size_t> seed;
  // Depth-first over index-increasing seeds.
  auto visit = [&](auto&& self, std::size_t start) -> void {
    PartialSlate state(learner);
    bool valid = true;
    for (std::size_t j : seed) {
      const auto& item = content[j];
      if (count_overlap(state.uncovered, item) == 0 || !state.fits(item, learner) ||
          !state.prereq_ok_with(j, learner, prereqs, content)) {
        valid = false;
        break;
      }
      state.add(j, item);
    }
    if (!valid) return;
    complete_by_ratio(state, candidates, learner, prereqs, content);
    if (state.open_gaps() < best_open) {
      best_open = state.open_gaps();
      best = state;
    }
    if (seed.size() == s || best_open == 0) return;
    for (std::size_t t = start; t < candidates.size(); ++t) {
      seed.push_back(candidates[t]);
      self(self, t + 1);
      seed.pop_back();
      if (best_open == 0) return;
    }
  };
  visit(visit, 0);
  return best;
}

}  // namespace

void GreedyConfig::validate() const {
  if (safeguard_seed_size > 3) {
    throw Error("invalid_config", "safeguard_seed_size must be <= 3");
  }
}

double greedy_score(const ContentItem& item, std::span<const std::uint8_t> uncovered,
                    std::span<const std::uint8_t> covered_so_far,
                    const LearnerState& learner, const ObjectiveWeights& weights,
                    int tier) {
  const int dist = level_distance(item.level, learner.preferred());
  if (dist > tier) {
    throw Error("tier_violation",
                fmt::format("item '{}' at distance {} scored at tier {}", item.id,
                            dist, tier));
  }
  if (uncovered.size() != item.coverage.size()) {
    throw DimensionError("skills", item.coverage.size(), uncovered.size());
  }
  const double gain = static_cast<double>(count_overlap(uncovered, item));
  const double overlap = static_cast<double>(count_overlap(covered_so_far, item));
  return gain - (weights.epsilon * item.duration_minutes + weights.omega * dist +
                 weights.gamma_overlap * overlap);
}

AssignmentSlate solve_greedy(const LearnerState& learner,
                             const AdmissiblePool& pool,
                             std::span<const ContentItem> content,
                             const PrereqGraph& prereqs,
                             const GreedyConfig& config) {
  config.validate();
  config.weights.validate(learner.skills());
  const auto& w = config.weights;
  const std::size_t max_iterations =
      config.max_iterations ? config.max_iterations : pool.nonredundant_ids.size();
  const int top_tier = config.fallback_enabled ? kMaxFallbackTier : 0;

  AssignmentSlate slate;
  slate.learner_id = learner.id();
  slate.solver = "greedy";
  PartialSlate state(learner);
  int tier = 0;

  for (std::size_t it = 0; it < max_iterations && state.open_gaps() > 0; ++it) {
    std::optional<std::size_t> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int t = tier; t <= top_tier && !best; ++t) {
      const int limit = config.fallback_enabled ? t : kMaxFallbackTier;
      for (std::size_t j : pool.nonredundant_ids) {
        const auto& item = content[j];
        if (level_distance(item.level, learner.preferred()) > limit) continue;
        if (count_overlap(state.uncovered, item) == 0) continue;
        if (std::find(state.picks.begin(), state.picks.end(), j) != state.picks.end()) {
          continue;
        }
        if (!state.fits(item, learner)) continue;
        if (!state.prereq_ok_with(j, learner, prereqs, content)) continue;
        const double f =
            greedy_score(item, state.uncovered, state.covered, learner, w, limit);
        if (f > best_score) {
          best_score = f;
          best = j;
        }
      }
      if (best) tier = t;
    }
    if (!best) break;
    TraceEntry entry;
    entry.event = "pick";
    entry.content = *best;
    entry.content_id = content[*best].id;
    entry.skills = newly_covered(state.uncovered, content[*best]);
    entry.value = best_score;
    entry.tier = tier;
    entry.reason = "max_net_gain";
    slate.trace.push_back(std::move(entry));
    state.add(*best, content[*best]);
  }

  if (state.open_gaps() > 0) {
    std::vector<std::size_t> candidates;
    bool blocked = false;
    for (std::size_t j : pool.nonredundant_ids) {
      if (count_overlap(learner.gaps(), content[j]) == 0) continue;
      candidates.push_back(j);
      const bool picked =
          std::find(state.picks.begin(), state.picks.end(), j) != state.picks.end();
      if (!picked && count_overlap(state.uncovered, content[j]) > 0) blocked = true;
    }
    if (config.knapsack_safeguard && blocked) {
      auto alt = partial_enumeration(learner, candidates, prereqs, content, config);
      if (alt && alt->open_gaps() < state.open_gaps()) {
        slate.trace.clear();
        slate.trace.push_back(
            {"note", std::nullopt, "", {}, 0.0, 0,
             fmt::format("knapsack_safeguard: open gaps {} -> {}",
                         state.open_gaps(), alt->open_gaps())});
        PartialSlate replay(learner);
        int running = 0;
        for (std::size_t j : alt->picks) {
          running = std::max(running, pick_tier(content[j], learner,
                                                config.fallback_enabled));
          TraceEntry entry;
          entry.event = "pick";
          entry.content = j;
          entry.content_id = content[j].id;
          entry.skills = newly_covered(replay.uncovered, content[j]);
          entry.value = static_cast<double>(entry.skills.size()) /
                        content[j].duration_minutes;
          entry.tier = running;
          entry.reason = "knapsack_safeguard";
          slate.trace.push_back(std::move(entry));
          replay.add(j, content[j]);
        }
        state = *alt;
      }
    }
  }
  if (slate.trace.empty() && learner.gap_count() > 0) {
    slate.trace.push_back({"note", std::nullopt, "", {}, 0.0, 0, "no_candidates"});
  }

  slate.selected = state.picks;
  refresh_slate(slate, learner, content);
  for (std::size_t k = 0; k < learner.skills(); ++k) {
    if (slate.slack[k] == 0) continue;
    bool coverable = false;
    bool fits = false;
    for (std::size_t j : pool.admissible_ids) {
      if (!content[j].covers(k)) continue;
      coverable = true;
      fits = fits || state.fits(content[j], learner);
    }
    const char* reason = !coverable ? "no_candidates" : (fits ? "prerequisite" : "budget");
    slate.trace.push_back({"slack", std::nullopt, "", {k}, 1.0, 0, reason});
  }
  slate.rationale = "greedy";
  return slate;
}

}  // namespace remedy
