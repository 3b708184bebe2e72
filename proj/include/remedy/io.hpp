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

// File formats. Skills are 1-indexed in files and 0-indexed in memory.
// Lines starting with '#' carry provenance (config hash, seed) and are
// skipped by every loader.

#ifndef REMEDY_IO_HPP_
#define REMEDY_IO_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "remedy/metrics.hpp"
#include "remedy/model.hpp"
#include "remedy/psychometrics.hpp"

namespace remedy {

namespace fs = std::filesystem;

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row
};

CsvTable read_csv(const fs::path& path);
// Writes header and rows; a provenance comment line comes first if given.
void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::optional<Provenance>& meta);
void write_json(const fs::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const fs::path& path);

// Shortest round-trip decimal form.
std::string format_number(double v);

// content_id,duration_min,level,skill_1..skill_K[,rep_1..rep_R]
std::vector<ContentItem> load_content_csv(const fs::path& path);
void write_content_csv(const fs::path& path, std::span<const ContentItem> items,
                       const std::optional<Provenance>& meta = std::nullopt);

struct ResponseTable {
  std::vector<std::string> learner_ids;
  std::vector<std::string> item_ids;
  BinaryMatrix responses;
};

// learner_id,<item ids...>
ResponseTable load_responses_csv(const fs::path& path);
void write_responses_csv(const fs::path& path, const ResponseTable& table,
                         const std::optional<Provenance>& meta = std::nullopt);

struct ItemBank {
  std::vector<std::string> ids;
  std::vector<ItemParams3PL> irt;
  std::vector<std::optional<ItemParamsDINA>> dina;
};

// item_id,a,d|b[,c][,guess,slip]; d is converted to b = -d/a.
ItemBank load_item_params_csv(const fs::path& path);
// Writes the slope-difficulty form (exact round trip).
void write_item_params_csv(const fs::path& path, const ItemBank& bank,
                           const std::optional<Provenance>& meta = std::nullopt);

struct QMatrixTable {
  std::vector<std::string> item_ids;
  QMatrix qmatrix;
};

// item_id,skill_1..skill_K
QMatrixTable load_qmatrix_csv(const fs::path& path);
void write_qmatrix_csv(const fs::path& path, std::span<const std::string> item_ids,
                       const QMatrix& qmatrix,
                       const std::optional<Provenance>& meta = std::nullopt);

// from_skill,to_skill (0-indexed). A missing path yields an empty graph.
PrereqGraph load_prereqs_csv(const std::optional<fs::path>& path, std::size_t skills);

struct LearnerRecord {
  std::string id;
  double theta = 0;
  BinaryVector mastery;
  std::optional<double> se;
  std::optional<double> time_budget_min;
  std::optional<std::size_t> slate_cap;
};

// learner_id,theta,skill_1..skill_K[,se][,time_budget_min][,slate_cap]
std::vector<LearnerRecord> load_learners_csv(const fs::path& path);
void write_learners_csv(const fs::path& path, std::span<const LearnerRecord> learners,
                        const std::optional<Provenance>& meta = std::nullopt);

nlohmann::json slate_to_json(const AssignmentSlate& slate,
                             std::span<const ContentItem> content);
// Resolves content ids against `content`.
AssignmentSlate slate_from_json(const nlohmann::json& doc,
                                std::span<const ContentItem> content);

nlohmann::json report_to_json(const EvaluationReport& report);
nlohmann::json provenance_json(const Provenance& meta);

}  // namespace remedy

#endif  // REMEDY_IO_HPP_
