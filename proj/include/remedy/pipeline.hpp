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

// Cohort-level orchestration and the subcommands behind the CLI. Each
// command reads its inputs, writes artifacts into an output directory and
// returns the list of files written.

#ifndef REMEDY_PIPELINE_HPP_
#define REMEDY_PIPELINE_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remedy/config.hpp"
#include "remedy/gradient.hpp"
#include "remedy/io.hpp"
#include "remedy/metrics.hpp"

namespace remedy {

// Window, budget and cap defaults applied to loaded records.
std::vector<LearnerState> make_learners(std::span<const LearnerRecord> records,
                                        const RunConfig& config, std::size_t content_size);

// Window used to filter a learner's pool. With greedy fallback on, the
// pool spans every level the fallback tiers can reach.
DifficultyWindow pool_window(const LearnerState& learner, const RunConfig& config);

struct CohortAssignment {
  std::vector<AdmissiblePool> pools;
  std::vector<AssignmentSlate> slates;
  std::vector<UncoverablePair> certificate;
  // Optimizer history for learners solved by gd alone.
  std::vector<std::optional<OptimizeResult>> relaxed;
};

// `solver` is greedy, gd, hybrid or auto; auto picks per learner from the
// pool richness (or the cohort median when the policy asks for it).
CohortAssignment assign_cohort(std::span<const LearnerState> learners,
                               std::span<const ContentItem> content,
                               const PrereqGraph& prereqs, const RunConfig& config,
                               const std::string& solver);

Provenance provenance_of(const RunConfig& config);

struct CommandInputs {
  std::optional<fs::path> content;
  std::optional<fs::path> learners;
  std::optional<fs::path> responses;
  std::optional<fs::path> qmatrix;
  std::optional<fs::path> items;
  std::optional<fs::path> prereqs;
  std::optional<fs::path> slates;
  bool gd_trace = false;  // assign: also write gd_trace.csv
};

using Artifacts = std::vector<fs::path>;

// responses.csv, qmatrix.csv, item_params.csv, learners_true.csv
Artifacts run_synth_cohort(const RunConfig& config, const fs::path& out);
// content.csv
Artifacts run_synth_content(const RunConfig& config, const fs::path& out);
// learners.csv, dina_params.csv, diagnose.json
Artifacts run_diagnose(const RunConfig& config, const CommandInputs& in, const fs::path& out);
// cat_transcripts.csv, cat_summary.json
Artifacts run_cat_sim(const RunConfig& config, const CommandInputs& in, const fs::path& out);
// slates.json, slack_report.json[, gd_trace.csv]
Artifacts run_assign(const RunConfig& config, const CommandInputs& in, const fs::path& out);
// report.json
Artifacts run_evaluate(const RunConfig& config, const CommandInputs& in, const fs::path& out);
// metrics.csv
Artifacts run_compare(const RunConfig& config, const fs::path& out);
// oracle.json
Artifacts run_oracle(const RunConfig& config, const CommandInputs& in, const fs::path& out);

struct CompareRow {
  std::size_t pool_size = 0;
  std::string solver;
  EvaluationReport report;
};

// The sweep behind `compare`, without file output.
std::vector<CompareRow> compare_sweep(const RunConfig& config);

}  // namespace remedy

#endif  // REMEDY_PIPELINE_HPP_
