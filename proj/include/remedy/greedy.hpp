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

// Net-gain greedy selection with a redundancy penalty and tiered
// difficulty fallback.

#ifndef REMEDY_GREEDY_HPP_
#define REMEDY_GREEDY_HPP_

#include <span>

#include "remedy/feasibility.hpp"
#include "remedy/model.hpp"

namespace remedy {

inline constexpr int kMaxFallbackTier = 2;

struct GreedyConfig {
  ObjectiveWeights weights;
  bool fallback_enabled = true;
  std::size_t max_iterations = 0;  // 0 means the pool size
  // When picks stop with gaps still open but some covering item was
  // blocked by a budget, compare against partial enumeration (seed sets of
  // up to `safeguard_seed_size`, completed by coverage per minute) and keep
  // whichever covers more gaps.
  bool knapsack_safeguard = true;
  std::size_t safeguard_seed_size = 3;
  std::size_t safeguard_max_seeds = 50000;

  void validate() const;
};

// F = |uncovered & C_j| - (eps * L_j + omega * dist(D_j, P) + gamma * overlap),
// overlap = |covered_so_far & C_j|. Throws if dist exceeds `tier`.
double greedy_score(const ContentItem& item, std::span<const std::uint8_t> uncovered,
                    std::span<const std::uint8_t> covered_so_far,
                    const LearnerState& learner, const ObjectiveWeights& weights,
                    int tier);

AssignmentSlate solve_greedy(const LearnerState& learner,
                             const AdmissiblePool& pool,
                             std::span<const ContentItem> content,
                             const PrereqGraph& prereqs,
                             const GreedyConfig& config = {});

}  // namespace remedy

#endif  // REMEDY_GREEDY_HPP_
