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

#include "remedy/metrics.hpp"

#include <cmath>

namespace remedy {
namespace {

void check_pairing(std::span<const AssignmentSlate> slates,
                   std::span<const LearnerState> learners) {
  if (slates.size() != learners.size()) {
    throw DimensionError("learners", learners.size(), slates.size());
  }
  for (std::size_t i = 0; i < slates.size(); ++i) {
    if (slates[i].learner_id != learners[i].id()) {
      throw Error("learner_mismatch", "slate " + std::to_string(i) + " belongs to '" +
                                          slates[i].learner_id + "', expected '" +
                                          learners[i].id() + "'");
    }
  }
}

bool all_gaps_covered(const AssignmentSlate& slate, const LearnerState& learner,
                      std::span<const ContentItem> content) {
  const auto covered = covered_skills(slate.selected, content, learner.skills());
  for (std::size_t k = 0; k < learner.skills(); ++k) {
    if (learner.has_gap(k) && !covered[k]) return false;
  }
  return true;
}

// Redundant incidences for one slate, attributed to the later pick.
std::size_t redundant_incidences(const AssignmentSlate& slate,
                                 const LearnerState& learner,
                                 std::span<const ContentItem> content,
                                 std::vector<std::size_t>* per_content) {
  BinaryVector seen(learner.skills(), 0);
  std::size_t total = 0;
  for (std::size_t j : slate.selected) {
    for (std::size_t k = 0; k < learner.skills(); ++k) {
      if (!content[j].coverage[k]) continue;
      if (!learner.has_gap(k) || seen[k]) {
        ++total;
        if (per_content) ++(*per_content)[j];
      }
      seen[k] = 1;
    }
  }
  return total;
}

}  // namespace

MeanSd summarize(std::span<const double> values) {
  MeanSd out;
  out.count = values.size();
  if (values.empty()) return out;
  double sum = 0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

double satisfactory_rate(std::span<const AssignmentSlate> slates,
                         std::span<const LearnerState> learners,
                         std::span<const ContentItem> content) {
  check_pairing(slates, learners);
  if (learners.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < slates.size(); ++i) {
    ok += all_gaps_covered(slates[i], learners[i], content) ? 1 : 0;
  }
  return 100.0 * static_cast<double>(ok) / static_cast<double>(learners.size());
}

std::vector<std::size_t> marginal_gains(const AssignmentSlate& slate,
                                        const LearnerState& learner,
                                        std::span<const ContentItem> content) {
  BinaryVector open = learner.gaps();
  std::vector<std::size_t> gains;
  for (std::size_t j : slate.selected) {
    std::size_t g = 0;
    for (std::size_t k = 0; k < learner.skills(); ++k) {
      if (open[k] && content[j].coverage[k]) {
        ++g;
        open[k] = 0;
      }
    }
    gains.push_back(g);
  }
  return gains;
}

MeanSd gain_decay(std::span<const AssignmentSlate> slates,
                  std::span<const LearnerState> learners,
                  std::span<const ContentItem> content) {
  check_pairing(slates, learners);
  std::vector<double> per;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < slates.size(); ++i) {
    const auto gains = marginal_gains(slates[i], learners[i], content);
    if (gains.empty()) {
      ++excluded;
      continue;
    }
    const double opt = static_cast<double>(gains.front());
    double sum = 0;
    for (std::size_t g : gains) sum += static_cast<double>(g) - opt;
    per.push_back(sum / static_cast<double>(gains.size()));
  }
  MeanSd out = summarize(per);
  out.excluded = excluded;
  return out;
}

MeanSd utility(std::span<const AssignmentSlate> slates,
               std::span<const LearnerState> learners,
               std::span<const ContentItem> content) {
  check_pairing(slates, learners);
  std::vector<double> per;
  std::size_t excluded = 0;
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < slates.size(); ++i) {
    const auto& learner = learners[i];
    double minutes = 0;
    for (std::size_t j : slates[i].selected) minutes += content[j].duration_minutes;
    if (minutes <= 0) {
      if (learner.gap_count() == 0) {
        ++excluded;
      } else {
        ++flagged;
        per.push_back(0.0);
      }
      continue;
    }
    const auto covered = covered_skills(slates[i].selected, content, learner.skills());
    double needed = 0;
    for (std::size_t k = 0; k < learner.skills(); ++k) {
      if (learner.has_gap(k) && covered[k]) needed += 1;
    }
    per.push_back(needed / minutes);
  }
  MeanSd out = summarize(per);
  out.excluded = excluded;
  out.flagged = flagged;
  return out;
}

std::vector<std::size_t> overcover_counts(std::span<const AssignmentSlate> slates,
                                          std::span<const LearnerState> learners,
                                          std::span<const ContentItem> content) {
  check_pairing(slates, learners);
  std::vector<std::size_t> per(content.size(), 0);
  for (std::size_t i = 0; i < slates.size(); ++i) {
    redundant_incidences(slates[i], learners[i], content, &per);
  }
  return per;
}

double total_penalty(std::span<const AssignmentSlate> slates,
                     std::span<const LearnerState> learners,
                     std::span<const ContentItem> content, double w1, double w2) {
  if (w1 < 0 || w2 < 0) throw Error("invalid_config", "penalty weights must be >= 0");
  const auto over = overcover_counts(slates, learners, content);
  std::vector<std::uint8_t> used(content.size(), 0);
  for (const auto& s : slates) {
    for (std::size_t j : s.selected) used[j] = 1;
  }
  double tp = 0;
  for (std::size_t v = 0; v < content.size(); ++v) {
    tp += w1 * static_cast<double>(over[v]) + w2 * (used[v] ? 0.0 : 1.0);
  }
  return tp;
}

CoverageCategories coverage_categories(std::span<const AssignmentSlate> slates,
                                       std::span<const LearnerState> learners,
                                       std::span<const ContentItem> content) {
  check_pairing(slates, learners);
  CoverageCategories out;
  std::vector<std::uint8_t> used(content.size(), 0);
  for (std::size_t i = 0; i < slates.size(); ++i) {
    for (std::size_t j : slates[i].selected) used[j] = 1;
    if (learners[i].gap_count() == 0) {
      ++out.no_gaps;
      continue;
    }
    if (!all_gaps_covered(slates[i], learners[i], content)) {
      ++out.unsatisfied;
    } else if (redundant_incidences(slates[i], learners[i], content, nullptr) == 0) {
      ++out.fully_covered;
    } else {
      ++out.over_covered;
    }
  }
  for (auto u : used) out.non_used += u ? 0 : 1;
  return out;
}

EvaluationReport evaluate(std::span<const AssignmentSlate> slates,
                          std::span<const LearnerState> learners,
                          std::span<const ContentItem> content, double w1, double w2) {
  EvaluationReport r;
  r.solver = slates.empty() ? "" : slates.front().solver;
  r.learners = learners.size();
  r.satisfactory_rate = satisfactory_rate(slates, learners, content);
  r.gain_decay = gain_decay(slates, learners, content);
  r.utility = utility(slates, learners, content);
  r.total_penalty = total_penalty(slates, learners, content, w1, w2);
  r.categories = coverage_categories(slates, learners, content);
  for (const auto& item : content) r.per_content_usage[item.id] = 0;
  for (std::size_t i = 0; i < slates.size(); ++i) {
    for (std::size_t j : slates[i].selected) ++r.per_content_usage[content[j].id];
    for (std::size_t k = 0; k < slates[i].slack.size(); ++k) {
      if (slates[i].slack[k] > 0) ++r.slack_summary[k];
    }
  }
  for (const auto& [id, n] : r.per_content_usage) r.unique_content_assigned += n > 0;
  return r;
}

}  // namespace remedy
