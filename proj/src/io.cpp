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

#include "remedy/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace remedy {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const fs::path& path, std::size_t line, const std::string& msg) {
  throw Error("bad_file", fmt::format("{}:{}: {}", path.string(), line, msg));
}

double parse_double(const std::string& cell, const fs::path& path, std::size_t line,
                    std::string_view column) {
  double v = 0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    fail(path, line, fmt::format("column '{}': '{}' is not a number", column, cell));
  }
  return v;
}

std::size_t parse_count(const std::string& cell, const fs::path& path, std::size_t line,
                        std::string_view column) {
  std::size_t v = 0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    fail(path, line, fmt::format("column '{}': '{}' is not a nonnegative integer", column,
                                 cell));
  }
  return v;
}

std::uint8_t parse_bit(const std::string& cell, const fs::path& path, std::size_t line,
                       std::string_view column) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  fail(path, line, fmt::format("column '{}': '{}' is not binary", column, cell));
}

// Count of consecutive columns named prefix_1..prefix_n starting at `from`.
std::size_t numbered_run(const std::vector<std::string>& header, std::size_t from,
                         std::string_view prefix) {
  std::size_t n = 0;
  while (from + n < header.size() &&
         header[from + n] == fmt::format("{}_{}", prefix, n + 1)) {
    ++n;
  }
  return n;
}

void require_width(const CsvTable& t, const fs::path& path) {
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != t.header.size()) {
      fail(path, t.lines[r],
           fmt::format("expected {} cells, found {}", t.header.size(), t.rows[r].size()));
    }
  }
}

std::string provenance_line(const Provenance& meta) {
  return fmt::format("# config_hash={},seed={}", meta.config_hash, meta.seed);
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", fmt::format("cannot open '{}'", path.string()));
  CsvTable t;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string clean = trim(line);
    if (clean.empty() || clean.front() == '#') continue;
    if (!have_header) {
      t.header = split(clean);
      have_header = true;
      continue;
    }
    t.rows.push_back(split(clean));
    t.lines.push_back(number);
  }
  if (!have_header) fail(path, number, "missing header row");
  return t;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::optional<Provenance>& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", fmt::format("cannot write '{}'", path.string()));
  if (meta) out << provenance_line(*meta) << '\n';
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << ',';
      out << cells[c];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", fmt::format("cannot write '{}'", path.string()));
  out << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("bad_file", fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
}

std::vector<ContentItem> load_content_csv(const fs::path& path) {
  const auto t = read_csv(path);
  const auto& h = t.header;
  if (h.size() < 4 || h[0] != "content_id" || h[1] != "duration_min" || h[2] != "level") {
    fail(path, 1, "header must start with content_id,duration_min,level,skill_1");
  }
  const std::size_t skills = numbered_run(h, 3, "skill");
  if (skills == 0) fail(path, 1, "no skill_1..skill_K columns");
  const std::size_t forms = numbered_run(h, 3 + skills, "rep");
  if (3 + skills + forms != h.size()) {
    fail(path, 1, fmt::format("unexpected column '{}'", h[3 + skills + forms]));
  }
  require_width(t, path);
  std::vector<ContentItem> items;
  std::set<std::string> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.lines[r];
    if (row[0].empty()) fail(path, line, "empty content_id");
    if (!ids.insert(row[0]).second) {
      fail(path, line, fmt::format("duplicate content_id '{}'", row[0]));
    }
    const double duration = parse_double(row[1], path, line, "duration_min");
    if (!(duration > 0)) fail(path, line, "duration_min must be positive");
    Level level;
    try {
      level = parse_level(row[2]);
    } catch (const Error& e) {
      fail(path, line, e.what());
    }
    BinaryVector coverage(skills);
    for (std::size_t k = 0; k < skills; ++k) {
      coverage[k] = parse_bit(row[3 + k], path, line, h[3 + k]);
    }
    BinaryVector tags(forms);
    for (std::size_t f = 0; f < forms; ++f) {
      tags[f] = parse_bit(row[3 + skills + f], path, line, h[3 + skills + f]);
    }
    try {
      items.push_back(
          ContentItem::make(row[0], std::move(coverage), duration, level, std::move(tags)));
    } catch (const Error& e) {
      fail(path, line, e.what());
    }
  }
  return items;
}

void write_content_csv(const fs::path& path, std::span<const ContentItem> items,
                       const std::optional<Provenance>& meta) {
  const std::size_t skills = items.empty() ? 0 : items[0].coverage.size();
  const std::size_t forms = items.empty() ? 0 : items[0].tags.size();
  std::vector<std::string> header{"content_id", "duration_min", "level"};
  for (std::size_t k = 0; k < skills; ++k) header.push_back(fmt::format("skill_{}", k + 1));
  for (std::size_t f = 0; f < forms; ++f) header.push_back(fmt::format("rep_{}", f + 1));
  std::vector<std::vector<std::string>> rows;
  for (const auto& item : items) {
    std::vector<std::string> row{item.id, format_number(item.duration_minutes),
                                 std::string(to_string(item.level))};
    for (auto v : item.coverage) row.push_back(v ? "1" : "0");
    for (auto v : item.tags) row.push_back(v ? "1" : "0");
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows, meta);
}

ResponseTable load_responses_csv(const fs::path& path) {
  const auto t = read_csv(path);
  if (t.header.size() < 2 || t.header[0] != "learner_id") {
    fail(path, 1, "header must be learner_id followed by item ids");
  }
  require_width(t, path);
  if (t.rows.empty()) fail(path, 1, "no learner rows");
  ResponseTable out;
  out.item_ids.assign(t.header.begin() + 1, t.header.end());
  out.responses = BinaryMatrix(t.rows.size(), out.item_ids.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.learner_ids.push_back(t.rows[r][0]);
    for (std::size_t c = 1; c < t.header.size(); ++c) {
      const auto& cell = t.rows[r][c];
      if (cell != "0" && cell != "1") {
        fail(path, t.lines[r],
             fmt::format("non-binary response '{}' at learner '{}', item '{}'", cell,
                         t.rows[r][0], t.header[c]));
      }
      out.responses(r, c - 1) = cell == "1";
    }
  }
  return out;
}

void write_responses_csv(const fs::path& path, const ResponseTable& table,
                         const std::optional<Provenance>& meta) {
  std::vector<std::string> header{"learner_id"};
  header.insert(header.end(), table.item_ids.begin(), table.item_ids.end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.learner_ids.size(); ++i) {
    std::vector<std::string> row{table.learner_ids[i]};
    for (auto v : table.responses.row(i)) row.push_back(v ? "1" : "0");
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows, meta);
}

ItemBank load_item_params_csv(const fs::path& path) {
  const auto t = read_csv(path);
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    static const std::set<std::string> known{"item_id", "a", "b", "d", "c", "guess", "slip"};
    if (!known.contains(t.header[c])) {
      fail(path, 1, fmt::format("unexpected column '{}'", t.header[c]));
    }
    if (!col.emplace(t.header[c], c).second) {
      fail(path, 1, fmt::format("duplicate column '{}'", t.header[c]));
    }
  }
  if (!col.contains("item_id") || !col.contains("a")) {
    fail(path, 1, "item parameters need item_id and a columns");
  }
  if (col.contains("b") == col.contains("d")) {
    fail(path, 1, "exactly one of the b or d columns is required");
  }
  if (col.contains("guess") != col.contains("slip")) {
    fail(path, 1, "guess and slip columns come together");
  }
  require_width(t, path);
  ItemBank bank;
  std::set<std::string> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.lines[r];
    const auto& id = row[col["item_id"]];
    if (id.empty() || !ids.insert(id).second) {
      fail(path, line, fmt::format("empty or duplicate item_id '{}'", id));
    }
    const double a = parse_double(row[col["a"]], path, line, "a");
    const double c = col.contains("c") ? parse_double(row[col["c"]], path, line, "c") : 0.0;
    try {
      if (col.contains("d")) {
        bank.irt.push_back(ItemParams3PL::from_slope_intercept(
            a, parse_double(row[col["d"]], path, line, "d"), c));
      } else {
        ItemParams3PL p{a, parse_double(row[col["b"]], path, line, "b"), c};
        p.validate();
        bank.irt.push_back(p);
      }
    } catch (const Error& e) {
      if (e.code() == "bad_file") throw;
      fail(path, line, e.what());
    }
    std::optional<ItemParamsDINA> dina;
    if (col.contains("guess")) {
      const auto& g = row[col["guess"]];
      const auto& s = row[col["slip"]];
      if (g.empty() != s.empty()) fail(path, line, "guess and slip must both be set or empty");
      if (!g.empty()) {
        dina = ItemParamsDINA{parse_double(s, path, line, "slip"),
                              parse_double(g, path, line, "guess")};
        try {
          dina->validate();
        } catch (const Error& e) {
          fail(path, line, e.what());
        }
      }
    }
    bank.ids.push_back(id);
    bank.dina.push_back(dina);
  }
  return bank;
}

void write_item_params_csv(const fs::path& path, const ItemBank& bank,
                           const std::optional<Provenance>& meta) {
  const bool has_dina =
      std::any_of(bank.dina.begin(), bank.dina.end(), [](const auto& d) { return d.has_value(); });
  std::vector<std::string> header{"item_id", "a", "b", "c"};
  if (has_dina) {
    header.push_back("guess");
    header.push_back("slip");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < bank.ids.size(); ++j) {
    std::vector<std::string> row{bank.ids[j], format_number(bank.irt[j].discrimination),
                                 format_number(bank.irt[j].difficulty),
                                 format_number(bank.irt[j].guessing)};
    if (has_dina) {
      row.push_back(bank.dina[j] ? format_number(bank.dina[j]->guess) : "");
      row.push_back(bank.dina[j] ? format_number(bank.dina[j]->slip) : "");
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows, meta);
}

QMatrixTable load_qmatrix_csv(const fs::path& path) {
  const auto t = read_csv(path);
  if (t.header.empty() || t.header[0] != "item_id") fail(path, 1, "header must start with item_id");
  const std::size_t skills = numbered_run(t.header, 1, "skill");
  if (skills == 0 || 1 + skills != t.header.size()) {
    fail(path, 1, "expected item_id,skill_1..skill_K");
  }
  require_width(t, path);
  if (t.rows.empty()) fail(path, 1, "no item rows");
  BinaryMatrix q(t.rows.size(), skills);
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ids.push_back(t.rows[r][0]);
    for (std::size_t k = 0; k < skills; ++k) {
      q(r, k) = parse_bit(t.rows[r][1 + k], path, t.lines[r], t.header[1 + k]);
    }
  }
  return {std::move(ids), QMatrix(std::move(q))};
}

void write_qmatrix_csv(const fs::path& path, std::span<const std::string> item_ids,
                       const QMatrix& qmatrix, const std::optional<Provenance>& meta) {
  std::vector<std::string> header{"item_id"};
  for (std::size_t k = 0; k < qmatrix.skills(); ++k) {
    header.push_back(fmt::format("skill_{}", k + 1));
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < qmatrix.items(); ++j) {
    std::vector<std::string> row{item_ids[j]};
    for (auto v : qmatrix.row(j)) row.push_back(v ? "1" : "0");
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows, meta);
}

PrereqGraph load_prereqs_csv(const std::optional<fs::path>& path, std::size_t skills) {
  if (!path) return PrereqGraph(skills, {});
  const auto t = read_csv(*path);
  if (t.header != std::vector<std::string>{"from_skill", "to_skill"}) {
    fail(*path, 1, "header must be from_skill,to_skill");
  }
  require_width(t, *path);
  std::vector<PrereqGraph::Edge> edges;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto from = parse_count(t.rows[r][0], *path, t.lines[r], "from_skill");
    const auto to = parse_count(t.rows[r][1], *path, t.lines[r], "to_skill");
    if (from >= skills || to >= skills) {
      fail(*path, t.lines[r], fmt::format("skill index outside 0..{}", skills - 1));
    }
    edges.emplace_back(from, to);
  }
  return PrereqGraph(skills, std::move(edges));
}

std::vector<LearnerRecord> load_learners_csv(const fs::path& path) {
  const auto t = read_csv(path);
  const auto& h = t.header;
  if (h.size() < 3 || h[0] != "learner_id" || h[1] != "theta") {
    fail(path, 1, "header must start with learner_id,theta,skill_1");
  }
  const std::size_t skills = numbered_run(h, 2, "skill");
  if (skills == 0) fail(path, 1, "no skill_1..skill_K columns");
  std::map<std::string, std::size_t> extra;
  for (std::size_t c = 2 + skills; c < h.size(); ++c) {
    if (h[c] != "se" && h[c] != "time_budget_min" && h[c] != "slate_cap") {
      fail(path, 1, fmt::format("unexpected column '{}'", h[c]));
    }
    if (!extra.emplace(h[c], c).second) fail(path, 1, fmt::format("duplicate column '{}'", h[c]));
  }
  require_width(t, path);
  std::vector<LearnerRecord> out;
  std::set<std::string> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.lines[r];
    LearnerRecord rec;
    rec.id = row[0];
    if (rec.id.empty() || !ids.insert(rec.id).second) {
      fail(path, line, fmt::format("empty or duplicate learner_id '{}'", rec.id));
    }
    rec.theta = parse_double(row[1], path, line, "theta");
    for (std::size_t k = 0; k < skills; ++k) {
      rec.mastery.push_back(parse_bit(row[2 + k], path, line, h[2 + k]));
    }
    // Override columns may be left empty per row to fall back to the
    // configured default.
    auto cell = [&](const char* name) -> const std::string* {
      auto it = extra.find(name);
      if (it == extra.end() || row[it->second].empty()) return nullptr;
      return &row[it->second];
    };
    if (const auto* v = cell("se")) rec.se = parse_double(*v, path, line, "se");
    if (const auto* v = cell("time_budget_min")) {
      rec.time_budget_min = parse_double(*v, path, line, "time_budget_min");
    }
    if (const auto* v = cell("slate_cap")) {
      rec.slate_cap = parse_count(*v, path, line, "slate_cap");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_learners_csv(const fs::path& path, std::span<const LearnerRecord> learners,
                        const std::optional<Provenance>& meta) {
  const std::size_t skills = learners.empty() ? 0 : learners[0].mastery.size();
  std::vector<std::string> header{"learner_id", "theta"};
  for (std::size_t k = 0; k < skills; ++k) header.push_back(fmt::format("skill_{}", k + 1));
  auto any = [&](auto member) {
    return std::any_of(learners.begin(), learners.end(),
                       [&](const LearnerRecord& l) { return (l.*member).has_value(); });
  };
  const bool se = any(&LearnerRecord::se);
  const bool budget = any(&LearnerRecord::time_budget_min);
  const bool cap = any(&LearnerRecord::slate_cap);
  if (se) header.push_back("se");
  if (budget) header.push_back("time_budget_min");
  if (cap) header.push_back("slate_cap");
  std::vector<std::vector<std::string>> rows;
  for (const auto& l : learners) {
    std::vector<std::string> row{l.id, format_number(l.theta)};
    for (auto v : l.mastery) row.push_back(v ? "1" : "0");
    if (se) row.push_back(l.se ? format_number(*l.se) : "");
    if (budget) row.push_back(l.time_budget_min ? format_number(*l.time_budget_min) : "");
    if (cap) row.push_back(l.slate_cap ? std::to_string(*l.slate_cap) : "");
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows, meta);
}

json slate_to_json(const AssignmentSlate& slate, std::span<const ContentItem> content) {
  json selected = json::array();
  for (std::size_t j : slate.selected) selected.push_back(content[j].id);
  json slack = json::array();
  for (std::size_t k = 0; k < slate.slack.size(); ++k) {
    if (slate.slack[k] > 0) slack.push_back(k + 1);
  }
  json trace = json::array();
  for (const auto& e : slate.trace) {
    json skills = json::array();
    for (std::size_t k : e.skills) skills.push_back(k + 1);
    trace.push_back({{"event", e.event},
                     {"content_id", e.content ? json(content[*e.content].id) : json(nullptr)},
                     {"skills", skills},
                     {"value", e.value},
                     {"tier", e.tier},
                     {"reason", e.reason}});
  }
  return {{"learner_id", slate.learner_id},
          {"solver", slate.solver},
          {"selected", selected},
          {"slack_skills", slack},
          {"total_minutes", slate.total_minutes},
          {"infeasible", slate.infeasible},
          {"rationale", slate.rationale},
          {"trace", trace}};
}

AssignmentSlate slate_from_json(const json& doc, std::span<const ContentItem> content) {
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < content.size(); ++j) index[content[j].id] = j;
  auto resolve = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Error("bad_file", fmt::format("slate references unknown content '{}'", id));
    }
    return it->second;
  };
  try {
    AssignmentSlate s;
    s.learner_id = doc.at("learner_id").get<std::string>();
    s.solver = doc.at("solver").get<std::string>();
    for (const auto& id : doc.at("selected")) s.selected.push_back(resolve(id.get<std::string>()));
    s.total_minutes = doc.at("total_minutes").get<double>();
    s.infeasible = doc.at("infeasible").get<bool>();
    s.rationale = doc.at("rationale").get<std::string>();
    const std::size_t skills = content.empty() ? 0 : content[0].coverage.size();
    s.slack.assign(skills, 0.0);
    for (const auto& k : doc.at("slack_skills")) {
      const auto v = k.get<std::size_t>();
      if (v == 0 || v > skills) throw Error("bad_file", "slack skill out of range");
      s.slack[v - 1] = 1.0;
    }
    for (const auto& e : doc.at("trace")) {
      TraceEntry t;
      t.event = e.at("event").get<std::string>();
      if (!e.at("content_id").is_null()) {
        t.content_id = e.at("content_id").get<std::string>();
        t.content = resolve(t.content_id);
      }
      for (const auto& k : e.at("skills")) t.skills.push_back(k.get<std::size_t>() - 1);
      t.value = e.at("value").get<double>();
      t.tier = e.at("tier").get<int>();
      t.reason = e.at("reason").get<std::string>();
      s.trace.push_back(std::move(t));
    }
    return s;
  } catch (const json::exception& e) {
    throw Error("bad_file", fmt::format("malformed slate JSON: {}", e.what()));
  }
}

json report_to_json(const EvaluationReport& r) {
  auto stat = [](const MeanSd& m) {
    return json{{"mean", m.mean}, {"sd", m.sd}, {"count", m.count},
                {"excluded", m.excluded}, {"flagged", m.flagged}};
  };
  json slack = json::object();
  for (const auto& [k, n] : r.slack_summary) slack[std::to_string(k + 1)] = n;
  return {{"solver", r.solver},
          {"learners", r.learners},
          {"satisfactory_rate", r.satisfactory_rate},
          {"gain_decay", stat(r.gain_decay)},
          {"utility", stat(r.utility)},
          {"total_penalty", r.total_penalty},
          {"fully_covered", r.categories.fully_covered},
          {"over_covered", r.categories.over_covered},
          {"unsatisfied", r.categories.unsatisfied},
          {"no_gaps", r.categories.no_gaps},
          {"non_used", r.categories.non_used},
          {"per_content_usage", r.per_content_usage},
          {"unique_content_assigned", r.unique_content_assigned},
          {"slack_summary", slack}};
}

json provenance_json(const Provenance& meta) {
  return {{"config_hash", meta.config_hash}, {"seed", meta.seed}};
}

}  // namespace remedy
