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

// Cohort-level evaluation of assignment slates.

#ifndef REMEDY_METRICS_HPP_
#define REMEDY_METRICS_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "remedy/model.hpp"

namespace remedy {

struct MeanSd {
  double mean = 0;
  double sd = 0;  // sample standard deviation; 0 for fewer than two values
  std::size_t count = 0;
  std::size_t excluded = 0;
  std::size_t flagged = 0;
};

MeanSd summarize(std::span<const double> values);

double satisfactory_rate(std::span<const AssignmentSlate> slates,
                         std::span<const LearnerState> learners,
                         std::span<const ContentItem> content);

// Marginal new-gap counts G_v for each pick, replaying `selected` order.
std::vector<std::size_t> marginal_gains(const AssignmentSlate& slate,
                                        const LearnerState& learner,
                                        std::span<const ContentItem> content);

// Per learner, mean over picks of (G_v - G_1); cohort mean/sd over learners
// with at least one pick.
MeanSd gain_decay(std::span<const AssignmentSlate> slates,
                  std::span<const LearnerState> learners,
                  std::span<const ContentItem> content);

// Needed-and-covered skills per assigned minute.
MeanSd utility(std::span<const AssignmentSlate> slates,
               std::span<const LearnerState> learners,
               std::span<const ContentItem> content);

// overcover_v per content: (learner, skill) incidences where v covers a
// mastered skill or one already covered by an earlier pick.
std::vector<std::size_t> overcover_counts(std::span<const AssignmentSlate> slates,
                                          std::span<const LearnerState> learners,
                                          std::span<const ContentItem> content);

double total_penalty(std::span<const AssignmentSlate> slates,
                     std::span<const LearnerState> learners,
                     std::span<const ContentItem> content, double w1 = 1.0,
                     double w2 = 1.0);

struct CoverageCategories {
  std::size_t fully_covered = 0;
  std::size_t over_covered = 0;
  std::size_t unsatisfied = 0;
  std::size_t no_gaps = 0;
  std::size_t non_used = 0;  // content items in no slate
};

CoverageCategories coverage_categories(std::span<const AssignmentSlate> slates,
                                       std::span<const LearnerState> learners,
                                       std::span<const ContentItem> content);

struct EvaluationReport {
  std::string solver;
  std::size_t learners = 0;
  double satisfactory_rate = 0;
  MeanSd gain_decay;
  MeanSd utility;
  double total_penalty = 0;
  CoverageCategories categories;
  std::map<std::string, std::size_t> per_content_usage;
  std::size_t unique_content_assigned = 0;
  std::map<std::size_t, std::size_t> slack_summary;  // skill -> learner count
};

EvaluationReport evaluate(std::span<const AssignmentSlate> slates,
                          std::span<const LearnerState> learners,
                          std::span<const ContentItem> content, double w1 = 1.0,
                          double w2 = 1.0);

}  // namespace remedy

#endif  // REMEDY_METRICS_HPP_
