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

// Admissible pools, structural predicates, richness and infeasibility
// certificates.

#ifndef REMEDY_FEASIBILITY_HPP_
#define REMEDY_FEASIBILITY_HPP_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "remedy/model.hpp"

namespace remedy {

enum class ExclusionReason { kDifficultyWindow, kOverlong, kPrerequisite, kDuplicate };

std::string_view to_string(ExclusionReason reason) noexcept;

struct Exclusion {
  std::size_t content = 0;
  ExclusionReason reason = ExclusionReason::kDifficultyWindow;
  friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

double jaccard(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

struct SimilarityPolicy {
  double threshold = 1.0;  // tau in (0, 1]

  void validate() const;
  bool similar(const ContentItem& a, const ContentItem& b) const;
};

using ContentPair = std::pair<std::size_t, std::size_t>;

// Pairs (j, l), j < l, among `ids` with sim(j, l) >= tau.
std::vector<ContentPair> similar_pairs(std::span<const std::size_t> ids,
                                       std::span<const ContentItem> content,
                                       const SimilarityPolicy& policy);

struct AdmissiblePool {
  std::string learner_id;
  DifficultyWindow window;                  // window the pool was filtered by
  std::vector<std::size_t> admissible_ids;  // after window/length/prereq screens
  std::vector<std::size_t> nonredundant_ids;
  // Every item outside nonredundant_ids, with its first failing reason.
  std::vector<Exclusion> excluded;
  std::vector<ContentPair> similar;  // R_tau restricted to admissible_ids
};

// Filters `content` for one learner. `window` defaults to the learner's
// own; solvers with difficulty fallback pass a widened one.
AdmissiblePool build_pool(const LearnerState& learner,
                          std::span<const ContentItem> content,
                          const PrereqGraph& prereqs,
                          const SimilarityPolicy& similarity);
AdmissiblePool build_pool(const LearnerState& learner,
                          std::span<const ContentItem> content,
                          const PrereqGraph& prereqs,
                          const SimilarityPolicy& similarity,
                          DifficultyWindow window);

// For every prerequisite edge k -> k', coverage of k' by the slate is at
// most S_k plus coverage of k by the slate.
bool prerequisite_ok(std::span<const std::size_t> slate,
                     const LearnerState& learner, const PrereqGraph& prereqs,
                     std::span<const ContentItem> content);

struct DiversityCheck {
  bool ok = true;
  std::string warning;
};

// At least `delta` distinct representation forms across the slate. Empty
// slates and delta = 1 over untagged content pass.
DiversityCheck diversity_ok(std::span<const std::size_t> slate,
                            std::size_t delta,
                            std::span<const ContentItem> content);

struct RichnessWeights {
  std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};
  void validate() const;
};

struct RichnessScore {
  double breadth = 0;
  double median_count = 0;  // squashed c / (1 + c)
  double representation_entropy = 0;
  double difficulty_spread = 0;
  RichnessWeights weights;
  double composite = 0;
  bool no_gaps = false;
};

RichnessScore richness(const LearnerState& learner, const AdmissiblePool& pool,
                       std::span<const ContentItem> content,
                       const RichnessWeights& weights = {});

struct UncoverablePair {
  std::string learner_id;
  std::size_t skill = 0;
  friend bool operator==(const UncoverablePair&, const UncoverablePair&) = default;
};

// (learner, skill) pairs with a gap that no admissible item covers.
std::vector<UncoverablePair> infeasibility_certificate(
    std::span<const LearnerState> learners,
    std::span<const AdmissiblePool> pools,
    std::span<const ContentItem> content);

}  // namespace remedy

#endif  // REMEDY_FEASIBILITY_HPP_
