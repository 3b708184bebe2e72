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

// Shared domain vocabulary: skill matrices, content items, learner state,
// prerequisite graphs, objective weights and assignment slates.

#ifndef REMEDY_MODEL_HPP_
#define REMEDY_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace remedy {

using BinaryVector = std::vector<std::uint8_t>;

// Base error for every failure raised by the library. `code` is a short
// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class DimensionError : public Error {
 public:
  DimensionError(std::string axis, std::size_t expected, std::size_t actual);
  const std::string& axis() const noexcept { return axis_; }

 private:
  std::string axis_;
};

// Dense row-major matrix.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using BinaryMatrix = Grid<std::uint8_t>;

// Ordered difficulty scale basic < medium < hard, encoded 0/1/2.
enum class Level : int { kBasic = 0, kMedium = 1, kHard = 2 };

constexpr int encode(Level level) noexcept { return static_cast<int>(level); }
Level level_from_index(int index);
Level parse_level(std::string_view token);  // case-insensitive
std::string_view to_string(Level level) noexcept;
int level_distance(Level a, Level b) noexcept;

// Item-by-skill requirement matrix. All-zero rows are legal and reported
// by untagged().
class QMatrix {
 public:
  explicit QMatrix(BinaryMatrix entries);

  std::size_t items() const noexcept { return entries_.rows(); }
  std::size_t skills() const noexcept { return entries_.cols(); }
  std::span<const std::uint8_t> row(std::size_t item) const {
    return entries_.row(item);
  }
  bool operator()(std::size_t item, std::size_t skill) const {
    return entries_(item, skill) != 0;
  }
  bool untagged(std::size_t item) const;
  std::vector<std::size_t> untagged_items() const;
  const BinaryMatrix& entries() const noexcept { return entries_; }

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

 private:
  BinaryMatrix entries_;
};

struct ContentItem {
  std::string id;
  BinaryVector coverage;       // C_j over skills
  double duration_minutes = 0; // L_j
  Level level = Level::kBasic; // D_j
  double difficulty_index = 0; // d_j, numeric encoding of level by default
  BinaryVector tags;           // representation forms M_jr, may be empty

  // Validates and fills difficulty_index from level.
  static ContentItem make(std::string id, BinaryVector coverage,
                          double duration_minutes, Level level,
                          BinaryVector tags = {});
  void validate(std::size_t skills) const;
  bool covers(std::size_t skill) const { return coverage[skill] != 0; }

  friend bool operator==(const ContentItem&, const ContentItem&) = default;
};

struct DifficultyWindow {
  Level lower = Level::kBasic;
  Level upper = Level::kHard;

  bool contains(double difficulty_index) const {
    return difficulty_index >= encode(lower) &&
           difficulty_index <= encode(upper);
  }
  friend bool operator==(const DifficultyWindow&,
                         const DifficultyWindow&) = default;
};

inline constexpr std::size_t kUnboundedSlate =
    std::numeric_limits<std::size_t>::max();

class LearnerState {
 public:
  LearnerState() = default;
  LearnerState(std::string id, double theta, BinaryVector mastery,
               double time_budget_minutes, std::size_t slate_cap,
               DifficultyWindow window, Level preferred);

  const std::string& id() const noexcept { return id_; }
  double theta() const noexcept { return theta_; }
  const BinaryVector& mastery() const noexcept { return mastery_; }
  std::size_t skills() const noexcept { return mastery_.size(); }
  // U = 1 - S, derived on every call.
  BinaryVector gaps() const;
  bool has_gap(std::size_t skill) const { return mastery_[skill] == 0; }
  std::size_t gap_count() const;
  double time_budget() const noexcept { return time_budget_; }
  std::size_t slate_cap() const noexcept { return slate_cap_; }
  const DifficultyWindow& window() const noexcept { return window_; }
  Level preferred() const noexcept { return preferred_; }

  LearnerState with_window(DifficultyWindow window) const;
  LearnerState with_budgets(double time_budget_minutes,
                            std::size_t slate_cap) const;

 private:
  std::string id_;
  double theta_ = 0;
  BinaryVector mastery_;
  double time_budget_ = 0;
  std::size_t slate_cap_ = kUnboundedSlate;
  DifficultyWindow window_;
  Level preferred_ = Level::kMedium;
};

// Skill precedence edges k -> k'. Construction rejects cycles.
class PrereqGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  PrereqGraph() = default;
  PrereqGraph(std::size_t skills, std::vector<Edge> edges);

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool empty() const noexcept { return edges_.empty(); }
  std::size_t skills() const noexcept { return skills_; }
  std::vector<std::size_t> prerequisites_of(std::size_t skill) const;
  // Skills in a topological order (prerequisites first).
  std::vector<std::size_t> topological_order() const;

 private:
  std::size_t skills_ = 0;
  std::vector<Edge> edges_;
};

struct ObjectiveWeights {
  double alpha = 1.0;           // coverage reward
  double beta = 0.1;            // burden penalty
  double epsilon = 0.05;        // minutes-to-count scaling
  double omega = 0.25;          // per-level difficulty distance penalty
  double gamma_overlap = 0.5;   // redundancy penalty in greedy scoring
  double gamma_slack = 100.0;   // uncovered-gap penalty

  // Throws Error("invalid_weights") unless all terms are nonnegative,
  // epsilon > 0 and gamma_slack > alpha * skills.
  void validate(std::size_t skills) const;
};

struct TraceEntry {
  std::string event;                   // pick | drop | add | slack | note
  std::optional<std::size_t> content;  // index into the content list
  std::string content_id;
  std::vector<std::size_t> skills;     // newly covered skills, or slack skill
  double value = 0;                    // score at selection or relaxed value
  int tier = 0;
  std::string reason;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct AssignmentSlate {
  std::string learner_id;
  std::string solver;
  std::vector<std::size_t> selected;  // content indices in pick order
  std::vector<double> slack;          // xi per skill
  double total_minutes = 0;
  std::vector<TraceEntry> trace;
  bool infeasible = false;
  std::string rationale;

  double slack_mass() const;
  bool contains(std::size_t content) const;
  friend bool operator==(const AssignmentSlate&,
                         const AssignmentSlate&) = default;
};

// Recomputes total_minutes and slack from `selected`.
void refresh_slate(AssignmentSlate& slate, const LearnerState& learner,
                   std::span<const ContentItem> content);

// Skills covered by the union of the given content indices.
BinaryVector covered_skills(std::span<const std::size_t> selected,
                            std::span<const ContentItem> content,
                            std::size_t skills);

}  // namespace remedy

#endif  // REMEDY_MODEL_HPP_
