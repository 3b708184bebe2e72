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

#include "remedy/objectives.hpp"

#include <algorithm>

namespace remedy {
namespace {

void check_shapes(const BinaryMatrix& gaps, const BinaryMatrix& coverage,
                  const BinaryMatrix& assignment) {
  if (coverage.cols() != gaps.cols()) {
    throw DimensionError("skills", gaps.cols(), coverage.cols());
  }
  if (assignment.rows() != gaps.rows()) {
    throw DimensionError("learners", gaps.rows(), assignment.rows());
  }
  if (assignment.cols() != coverage.rows()) {
    throw DimensionError("content", coverage.rows(), assignment.cols());
  }
}

}  // namespace

double coverage_reward(const BinaryMatrix& gaps, const BinaryMatrix& coverage,
                       const BinaryMatrix& assignment) {
  check_shapes(gaps, coverage, assignment);
  double total = 0;
  for (std::size_t i = 0; i < assignment.rows(); ++i) {
    for (std::size_t j = 0; j < assignment.cols(); ++j) {
      if (!assignment(i, j)) continue;
      for (std::size_t k = 0; k < gaps.cols(); ++k) {
        total += static_cast<double>(gaps(i, k) * coverage(j, k));
      }
    }
  }
  return total;
}

double burden_cost(const BinaryMatrix& assignment,
                   std::span<const double> durations, double epsilon) {
  if (durations.size() != assignment.cols()) {
    throw DimensionError("content", assignment.cols(), durations.size());
  }
  if (!(epsilon > 0)) throw Error("invalid_weights", "epsilon must be positive");
  double count = 0;
  double minutes = 0;
  for (std::size_t i = 0; i < assignment.rows(); ++i) {
    for (std::size_t j = 0; j < assignment.cols(); ++j) {
      if (assignment(i, j)) {
        count += 1;
        minutes += durations[j];
      }
    }
  }
  return count + epsilon * minutes;
}

double capped_coverage(const BinaryMatrix& gaps, const BinaryMatrix& coverage,
                       const BinaryMatrix& assignment) {
  check_shapes(gaps, coverage, assignment);
  double total = 0;
  for (std::size_t i = 0; i < gaps.rows(); ++i) {
    for (std::size_t k = 0; k < gaps.cols(); ++k) {
      if (!gaps(i, k)) continue;
      for (std::size_t j = 0; j < coverage.rows(); ++j) {
        if (assignment(i, j) && coverage(j, k)) {
          total += 1;
          break;
        }
      }
    }
  }
  return total;
}

BinaryMatrix coverage_matrix(std::span<const ContentItem> content) {
  const std::size_t skills = content.empty() ? 0 : content[0].coverage.size();
  BinaryMatrix c(content.size(), skills);
  for (std::size_t j = 0; j < content.size(); ++j) {
    if (content[j].coverage.size() != skills) {
      throw DimensionError("skills", skills, content[j].coverage.size());
    }
    std::copy(content[j].coverage.begin(), content[j].coverage.end(),
              c.row(j).begin());
  }
  return c;
}

double slate_capped_coverage(const LearnerState& learner,
                             std::span<const std::size_t> selected,
                             std::span<const ContentItem> content) {
  const auto covered = covered_skills(selected, content, learner.skills());
  double total = 0;
  for (std::size_t k = 0; k < learner.skills(); ++k) {
    if (learner.has_gap(k) && covered[k]) total += 1;
  }
  return total;
}

double slate_burden(std::span<const std::size_t> selected,
                    std::span<const ContentItem> content, double epsilon) {
  double minutes = 0;
  for (std::size_t j : selected) minutes += content[j].duration_minutes;
  return static_cast<double>(selected.size()) + epsilon * minutes;
}

double slate_objective(const LearnerState& learner,
                       std::span<const std::size_t> selected,
                       std::span<const ContentItem> content,
                       const ObjectiveWeights& weights) {
  const double capped = slate_capped_coverage(learner, selected, content);
  const double uncovered = static_cast<double>(learner.gap_count()) - capped;
  return weights.alpha * capped -
         weights.beta * slate_burden(selected, content, weights.epsilon) -
         weights.gamma_slack * uncovered;
}

}  // namespace remedy
