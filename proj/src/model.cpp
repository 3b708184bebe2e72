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

#include "remedy/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>

#include <fmt/format.h>

namespace remedy {

DimensionError::DimensionError(std::string axis, std::size_t expected,
                               std::size_t actual)
    : Error("dimension_mismatch",
            fmt::format("dimension mismatch on axis '{}': expected {}, got {}",
                        axis, expected, actual)),
      axis_(std::move(axis)) {}

Level level_from_index(int index) {
  if (index < 0 || index > 2) {
    throw Error("bad_level", fmt::format("level index {} outside 0..2", index));
  }
  return static_cast<Level>(index);
}

Level parse_level(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "basic") return Level::kBasic;
  if (lower == "medium") return Level::kMedium;
  if (lower == "hard") return Level::kHard;
  throw Error("bad_level", fmt::format("unknown level token '{}'", token));
}

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::kBasic:
      return "basic";
    case Level::kMedium:
      return "medium";
    case Level::kHard:
      return "hard";
  }
  return "basic";
}

int level_distance(Level a, Level b) noexcept {
  return std::abs(encode(a) - encode(b));
}

QMatrix::QMatrix(BinaryMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.cols() == 0) {
    throw Error("invalid_qmatrix", "Q-matrix dimensions must be positive");
  }
  for (auto v : entries_.data()) {
    if (v > 1) throw Error("invalid_qmatrix", "Q-matrix entries must be 0/1");
  }
}

bool QMatrix::untagged(std::size_t item) const {
  auto r = row(item);
  return std::none_of(r.begin(), r.end(), [](auto v) { return v != 0; });
}

std::vector<std::size_t> QMatrix::untagged_items() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < items(); ++j) {
    if (untagged(j)) out.push_back(j);
  }
  return out;
}

ContentItem ContentItem::make(std::string id, BinaryVector coverage,
                              double duration_minutes, Level level,
                              BinaryVector tags) {
  ContentItem item;
  item.id = std::move(id);
  item.coverage = std::move(coverage);
  item.duration_minutes = duration_minutes;
  item.level = level;
  item.difficulty_index = encode(level);
  item.tags = std::move(tags);
  item.validate(item.coverage.size());
  return item;
}

void ContentItem::validate(std::size_t skills) const {
  if (coverage.size() != skills) {
    throw DimensionError("skills", skills, coverage.size());
  }
  if (!(duration_minutes > 0) || !std::isfinite(duration_minutes)) {
    throw Error("invalid_content",
                fmt::format("content '{}' has nonpositive duration", id));
  }
  if (std::none_of(coverage.begin(), coverage.end(),
                   [](auto v) { return v != 0; })) {
    throw Error("invalid_content",
                fmt::format("content '{}' covers no skill", id));
  }
}

LearnerState::LearnerState(std::string id, double theta, BinaryVector mastery,
                           double time_budget_minutes, std::size_t slate_cap,
                           DifficultyWindow window, Level preferred)
    : id_(std::move(id)),
      theta_(theta),
      mastery_(std::move(mastery)),
      time_budget_(time_budget_minutes),
      slate_cap_(slate_cap),
      window_(window),
      preferred_(preferred) {
  if (mastery_.empty()) {
    throw Error("invalid_learner", fmt::format("learner '{}' has no skills", id_));
  }
  if (!(time_budget_ > 0)) {
    throw Error("invalid_learner",
                fmt::format("learner '{}' needs a positive time budget", id_));
  }
  if (slate_cap_ == 0) {
    throw Error("invalid_learner",
                fmt::format("learner '{}' needs a positive slate cap", id_));
  }
  if (encode(window_.lower) > encode(preferred_) ||
      encode(preferred_) > encode(window_.upper)) {
    throw Error("invalid_learner",
                fmt::format("learner '{}': preferred level outside window", id_));
  }
}

BinaryVector LearnerState::gaps() const {
  BinaryVector u(mastery_.size());
  for (std::size_t k = 0; k < mastery_.size(); ++k) u[k] = mastery_[k] ? 0 : 1;
  return u;
}

std::size_t LearnerState::gap_count() const {
  return static_cast<std::size_t>(
      std::count(mastery_.begin(), mastery_.end(), std::uint8_t{0}));
}

LearnerState LearnerState::with_window(DifficultyWindow window) const {
  LearnerState copy = *this;
  copy.window_ = window;
  return copy;
}

LearnerState LearnerState::with_budgets(double time_budget_minutes,
                                        std::size_t slate_cap) const {
  return LearnerState(id_, theta_, mastery_, time_budget_minutes, slate_cap,
                      window_, preferred_);
}

PrereqGraph::PrereqGraph(std::size_t skills, std::vector<Edge> edges)
    : skills_(skills), edges_(std::move(edges)) {
  for (const auto& [from, to] : edges_) {
    if (from >= skills_ || to >= skills_) {
      throw Error("invalid_prereq",
                  fmt::format("edge {}->{} references a skill outside 0..{}",
                              from, to, skills_ - 1));
    }
    if (from == to) {
      throw Error("prereq_cycle", fmt::format("self-loop on skill {}", from));
    }
  }
  // Throws on cycle.
  (void)topological_order();
}

std::vector<std::size_t> PrereqGraph::prerequisites_of(std::size_t skill) const {
  std::vector<std::size_t> out;
  for (const auto& [from, to] : edges_) {
    if (to == skill) out.push_back(from);
  }
  return out;
}

std::vector<std::size_t> PrereqGraph::topological_order() const {
  std::vector<std::size_t> indegree(skills_, 0);
  for (const auto& e : edges_) ++indegree[e.second];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>>
      ready;
  for (std::size_t k = 0; k < skills_; ++k) {
    if (indegree[k] == 0) ready.push(k);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t k = ready.top();
    ready.pop();
    order.push_back(k);
    for (const auto& [from, to] : edges_) {
      if (from == k && --indegree[to] == 0) ready.push(to);
    }
  }
  if (order.size() != skills_) {
    throw Error("prereq_cycle", "prerequisite graph contains a cycle");
  }
  return order;
}

void ObjectiveWeights::validate(std::size_t skills) const {
  const double terms[] = {alpha, beta, epsilon, omega, gamma_overlap,
                          gamma_slack};
  for (double t : terms) {
    if (!(t >= 0) || !std::isfinite(t)) {
      throw Error("invalid_weights", "objective weights must be finite and >= 0");
    }
  }
  if (!(epsilon > 0)) {
    throw Error("invalid_weights", "epsilon must be positive");
  }
  if (!(gamma_slack > alpha * static_cast<double>(skills))) {
    throw Error("invalid_weights",
                fmt::format("gamma_slack ({}) must exceed alpha * K ({})",
                            gamma_slack, alpha * static_cast<double>(skills)));
  }
}

double AssignmentSlate::slack_mass() const {
  return std::accumulate(slack.begin(), slack.end(), 0.0);
}

bool AssignmentSlate::contains(std::size_t content) const {
  return std::find(selected.begin(), selected.end(), content) != selected.end();
}

BinaryVector covered_skills(std::span<const std::size_t> selected,
                            std::span<const ContentItem> content,
                            std::size_t skills) {
  BinaryVector covered(skills, 0);
  for (std::size_t j : selected) {
    for (std::size_t k = 0; k < skills; ++k) {
      if (content[j].coverage[k]) covered[k] = 1;
    }
  }
  return covered;
}

void refresh_slate(AssignmentSlate& slate, const LearnerState& learner,
                   std::span<const ContentItem> content) {
  slate.learner_id = learner.id();
  slate.total_minutes = 0;
  for (std::size_t j : slate.selected) {
    slate.total_minutes += content[j].duration_minutes;
  }
  const auto covered = covered_skills(slate.selected, content, learner.skills());
  slate.slack.assign(learner.skills(), 0.0);
  for (std::size_t k = 0; k < learner.skills(); ++k) {
    if (learner.has_gap(k) && !covered[k]) slate.slack[k] = 1.0;
  }
}

}  // namespace remedy
