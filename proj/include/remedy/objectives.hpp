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

// Pure objective evaluators over cohort-level matrices, plus per-slate
// conveniences used by solvers and arbitration.

#ifndef REMEDY_OBJECTIVES_HPP_
#define REMEDY_OBJECTIVES_HPP_

#include <span>

#include "remedy/model.hpp"

namespace remedy {

// Z1 = sum_{i,j,k} U_ik C_jk x_ij. gaps is N x K, coverage M x K,
// assignment N x M.
double coverage_reward(const BinaryMatrix& gaps, const BinaryMatrix& coverage,
                       const BinaryMatrix& assignment);

// Z2 = sum x_ij + epsilon * sum L_j x_ij.
double burden_cost(const BinaryMatrix& assignment,
                   std::span<const double> durations, double epsilon);

// Capped surrogate: sum_{i,k} U_ik min(1, sum_j C_jk x_ij).
double capped_coverage(const BinaryMatrix& gaps, const BinaryMatrix& coverage,
                       const BinaryMatrix& assignment);

BinaryMatrix coverage_matrix(std::span<const ContentItem> content);

// Per-learner forms over a slate of content indices.
double slate_capped_coverage(const LearnerState& learner,
                             std::span<const std::size_t> selected,
                             std::span<const ContentItem> content);
double slate_burden(std::span<const std::size_t> selected,
                    std::span<const ContentItem> content, double epsilon);
// alpha * capped - beta * burden - gamma_slack * uncovered gaps.
double slate_objective(const LearnerState& learner,
                       std::span<const std::size_t> selected,
                       std::span<const ContentItem> content,
                       const ObjectiveWeights& weights);

}  // namespace remedy

#endif  // REMEDY_OBJECTIVES_HPP_
