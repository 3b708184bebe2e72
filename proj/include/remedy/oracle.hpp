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

// Exhaustive subset enumeration for small pools.

#ifndef REMEDY_ORACLE_HPP_
#define REMEDY_ORACLE_HPP_

#include <span>
#include <vector>

#include "remedy/feasibility.hpp"
#include "remedy/model.hpp"

namespace remedy {

inline constexpr std::size_t kOracleHardCap = 24;

struct OracleLimits {
  std::size_t max_content = 20;
  std::size_t max_learners = 64;

  void validate() const;
};

enum class OracleObjective {
  kSlackPenalized,  // alpha * capped - beta * burden - gamma_slack * slack
  kCappedCoverage,  // capped coverage alone
};

struct OracleOptions {
  ObjectiveWeights weights;
  SimilarityPolicy similarity;
  std::size_t min_forms = 1;  // diversity delta
  OracleObjective objective = OracleObjective::kSlackPenalized;
  OracleLimits limits;
};

struct OracleResult {
  std::vector<std::size_t> selected;  // ascending content indices
  double value = 0;
  double capped = 0;
  std::size_t feasible_subsets = 0;
};

// Enumerates every subset of `candidates` that respects the budgets,
// prerequisites and near-duplicate rule, and returns the best one, ties to
// the lexicographically smallest index list.
// Candidates are expected to be window-filtered already.
OracleResult solve_exact(const LearnerState& learner,
                         std::span<const std::size_t> candidates,
                         std::span<const ContentItem> content,
                         const PrereqGraph& prereqs, const OracleOptions& options);

// Convenience over a built pool (uses its admissible ids).
OracleResult solve_exact(const LearnerState& learner, const AdmissiblePool& pool,
                         std::span<const ContentItem> content,
                         const PrereqGraph& prereqs, const OracleOptions& options);

AssignmentSlate oracle_slate(const LearnerState& learner, const OracleResult& result,
                             std::span<const ContentItem> content);

}  // namespace remedy

#endif  // REMEDY_ORACLE_HPP_
