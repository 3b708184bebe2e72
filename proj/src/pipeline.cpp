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

#include "remedy/pipeline.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "remedy/gradient.hpp"
#include "remedy/greedy.hpp"
#include "remedy/hybrid.hpp"
#include "remedy/oracle.hpp"
#include "remedy/parallel.hpp"
#include "remedy/rng.hpp"
#include "remedy/synth.hpp"

namespace remedy {

using nlohmann::json;

namespace {

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
  const auto width = std::to_string(count).size();
  return fmt::format("{}{:0{}}", prefix, index + 1, width);
}

std::vector<std::string> padded_ids(char prefix, std::size_t count) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < count; ++i) ids.push_back(padded_id(prefix, i, count));
  return ids;
}

const fs::path& need(const std::optional<fs::path>& path, std::string_view flag) {
  if (!path) throw Error("missing_input", fmt::format("--{} is required", flag));
  return *path;
}

fs::path prepare(const fs::path& out, std::string_view name) {
  fs::create_directories(out);
  return out / name;
}

json with_meta(const RunConfig& config, json body) {
  body["meta"] = provenance_json(provenance_of(config));
  return body;
}

std::size_t content_skills(std::span<const ContentItem> content,
                           std::span<const LearnerRecord> records) {
  if (!content.empty()) return content[0].coverage.size();
  if (!records.empty()) return records[0].mastery.size();
  return 0;
}

void check_skills(std::span<const LearnerRecord> records, std::size_t skills) {
  for (const auto& r : records) {
    if (r.mastery.size() != skills) {
      throw DimensionError("skills", skills, r.mastery.size());
    }
  }
}

AssignmentSlate solve_with(SolverKind kind, const LearnerState& learner,
                           const AdmissiblePool& pool, std::span<const ContentItem> content,
                           const PrereqGraph& prereqs, const RunConfig& config,
                           std::optional<OptimizeResult>& relaxed) {
  switch (kind) {
    case SolverKind::kGreedy:
      return solve_greedy(learner, pool, content, prereqs, config.greedy_config());
    case SolverKind::kGradient: {
      auto run = solve_gradient(learner, pool, content, prereqs, config.gradient_config());
      relaxed = std::move(run.relaxed);
      return std::move(run.slate);
    }
    case SolverKind::kHybrid:
      break;
  }
  return solve_hybrid(learner, pool, content, prereqs, config.greedy_config(),
                      config.gradient_config());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LoadedAssignInputs {
  std::vector<ContentItem> content;
  std::vector<LearnerRecord> records;
  std::vector<LearnerState> learners;
  PrereqGraph prereqs;
};

LoadedAssignInputs load_assign_inputs(const RunConfig& config, const CommandInputs& in) {
  LoadedAssignInputs d;
  d.content = load_content_csv(need(in.content, "content"));
  d.records = load_learners_csv(need(in.learners, "learners"));
  const auto skills = content_skills(d.content, d.records);
  check_skills(d.records, skills);
  d.prereqs = load_prereqs_csv(in.prereqs, skills);
  d.learners = make_learners(d.records, config, d.content.size());
  return d;
}

}  // namespace

Provenance provenance_of(const RunConfig& config) {
  return {config_hash(config), config.seed};
}

std::vector<LearnerState> make_learners(std::span<const LearnerRecord> records,
                                        const RunConfig& config, std::size_t content_size) {
  const std::size_t default_cap = config.budgets.slate_cap > 0
                                      ? config.budgets.slate_cap
                                      : std::max<std::size_t>(content_size, 1);
  std::vector<LearnerState> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const Level preferred = config.window.preferred(r.theta);
    out.emplace_back(r.id, r.theta, r.mastery,
                     r.time_budget_min.value_or(config.budgets.time_budget_min),
                     r.slate_cap.value_or(default_cap), config.window.window(preferred),
                     preferred);
  }
  return out;
}

DifficultyWindow pool_window(const LearnerState& learner, const RunConfig& config) {
  return config.greedy.fallback_enabled ? widen(learner.window(), kMaxFallbackTier)
                                        : learner.window();
}

CohortAssignment assign_cohort(std::span<const LearnerState> learners,
                               std::span<const ContentItem> content,
                               const PrereqGraph& prereqs, const RunConfig& config,
                               const std::string& solver) {
  const bool automatic = solver == "auto";
  const SolverKind fixed = automatic ? SolverKind::kGreedy : parse_solver(solver);
  if (!content.empty()) {
    for (const auto& l : learners) {
      if (l.skills() != content[0].coverage.size()) {
        throw DimensionError("skills", content[0].coverage.size(), l.skills());
      }
    }
  }
  const std::size_t n = learners.size();
  CohortAssignment result;
  result.pools.resize(n);
  parallel_for(n, config.threads, [&](std::size_t i) {
    result.pools[i] = build_pool(learners[i], content, prereqs, config.similarity,
                                 pool_window(learners[i], config));
  });

  std::vector<double> rho(n, 0.0);
  if (automatic) {
    parallel_for(n, config.threads, [&](std::size_t i) {
      rho[i] = richness(learners[i], result.pools[i], content, config.richness).composite;
    });
    if (config.policy.cohort_median) std::fill(rho.begin(), rho.end(), median(rho));
  }

  result.slates.resize(n);
  result.relaxed.resize(n);
  parallel_for(n, config.threads, [&](std::size_t i) {
    SolverKind kind = fixed;
    std::string rationale;
    if (automatic) {
      auto choice = choose_solver(rho[i], config.policy);
      kind = choice.kind;
      rationale = std::move(choice.rationale);
    }
    auto slate = solve_with(kind, learners[i], result.pools[i], content, prereqs, config,
                            result.relaxed[i]);
    if (automatic) {
      slate.rationale = slate.rationale.empty() ? rationale : rationale + "; " + slate.rationale;
    }
    const auto diversity = diversity_ok(slate.selected, config.diversity_min_forms, content);
    if (!diversity.ok) {
      TraceEntry note;
      note.event = "note";
      note.reason = diversity.warning.empty() ? "diversity_unmet" : diversity.warning;
      slate.trace.push_back(std::move(note));
    }
    result.slates[i] = std::move(slate);
  });

  result.certificate = infeasibility_certificate(learners, result.pools, content);
  return result;
}

Artifacts run_synth_cohort(const RunConfig& config, const fs::path& out) {
  const auto cohort = gen_cohort(config.cohort);
  const auto meta = provenance_of(config);
  const auto item_ids = padded_ids('q', config.cohort.n_items);
  const auto learner_ids = padded_ids('s', config.cohort.n_students);

  Artifacts files{prepare(out, "responses.csv"), out / "qmatrix.csv", out / "item_params.csv",
                  out / "learners_true.csv"};
  write_responses_csv(files[0], {learner_ids, item_ids, cohort.responses}, meta);
  write_qmatrix_csv(files[1], item_ids, cohort.qmatrix, meta);
  ItemBank bank{item_ids, cohort.irt, {}};
  for (const auto& d : cohort.dina) bank.dina.emplace_back(d);
  write_item_params_csv(files[2], bank, meta);

  std::vector<LearnerRecord> truth;
  for (std::size_t i = 0; i < learner_ids.size(); ++i) {
    const auto row = cohort.mastery.row(i);
    truth.push_back({learner_ids[i], cohort.theta[i], BinaryVector(row.begin(), row.end()),
                     std::nullopt, std::nullopt, std::nullopt});
  }
  write_learners_csv(files[3], truth, meta);
  return files;
}

Artifacts run_synth_content(const RunConfig& config, const fs::path& out) {
  const auto content = gen_content_pool(config.content);
  Artifacts files{prepare(out, "content.csv")};
  write_content_csv(files[0], content, provenance_of(config));
  return files;
}

Artifacts run_diagnose(const RunConfig& config, const CommandInputs& in, const fs::path& out) {
  const auto responses = load_responses_csv(need(in.responses, "responses"));
  const auto qtable = load_qmatrix_csv(need(in.qmatrix, "qmatrix"));
  const auto bank = load_item_params_csv(need(in.items, "items"));

  // Both item files are aligned to the response columns by id.
  auto align = [&](const std::vector<std::string>& ids, std::string_view what) {
    std::map<std::string, std::size_t> at;
    for (std::size_t j = 0; j < ids.size(); ++j) at[ids[j]] = j;
    std::vector<std::size_t> order;
    for (const auto& id : responses.item_ids) {
      auto it = at.find(id);
      if (it == at.end()) {
        throw Error("missing_item", fmt::format("item '{}' has no {} row", id, what));
      }
      order.push_back(it->second);
    }
    return order;
  };
  const auto q_order = align(qtable.item_ids, "Q-matrix");
  const auto p_order = align(bank.ids, "parameter");
  const std::size_t items = responses.item_ids.size();
  const std::size_t skills = qtable.qmatrix.skills();
  BinaryMatrix q(items, skills);
  std::vector<ItemParams3PL> irt;
  for (std::size_t j = 0; j < items; ++j) {
    for (std::size_t k = 0; k < skills; ++k) q(j, k) = qtable.qmatrix(q_order[j], k);
    irt.push_back(bank.irt[p_order[j]]);
  }
  const QMatrix qmatrix(std::move(q));

  const auto fit = fit_dina_em(responses.responses, qmatrix, config.em);
  const std::size_t n = responses.learner_ids.size();
  std::vector<LearnerRecord> learners(n);
  parallel_for(n, config.threads, [&](std::size_t i) {
    const auto est = estimate_theta_eap(responses.responses.row(i), irt, config.cat.grid);
    const auto map = fit.map_profiles.row(i);
    learners[i] = {responses.learner_ids[i], est.theta, BinaryVector(map.begin(), map.end()),
                   est.se, std::nullopt, std::nullopt};
  });

  const auto meta = provenance_of(config);
  Artifacts files{prepare(out, "learners.csv"), out / "dina_params.csv", out / "diagnose.json"};
  write_learners_csv(files[0], learners, meta);
  ItemBank fitted{responses.item_ids, irt, {}};
  for (const auto& d : fit.items) fitted.dina.emplace_back(d);
  write_item_params_csv(files[1], fitted, meta);

  auto ids_of = [&](const std::vector<std::size_t>& idx) {
    json a = json::array();
    for (auto j : idx) a.push_back(responses.item_ids[j]);
    return a;
  };
  write_json(files[2], with_meta(config, {{"iterations", fit.iterations},
                                          {"converged", fit.converged},
                                          {"log_likelihood", fit.log_likelihood},
                                          {"class_prior", fit.class_prior},
                                          {"clamped_items", ids_of(fit.clamped_items)},
                                          {"untagged_items", ids_of(fit.untagged_items)},
                                          {"non_monotone_items", ids_of(fit.non_monotone_items)}}));
  return files;
}

Artifacts run_cat_sim(const RunConfig& config, const CommandInputs& in, const fs::path& out) {
  CatBank bank;
  std::vector<std::string> item_ids;
  std::vector<std::string> learner_ids;
  std::vector<CatExaminee> examinees;
  if (in.items || in.learners) {
    const auto items = load_item_params_csv(need(in.items, "items"));
    const auto records = load_learners_csv(need(in.learners, "learners"));
    bank.irt = items.irt;
    item_ids = items.ids;
    for (const auto& r : records) {
      learner_ids.push_back(r.id);
      examinees.push_back({r.theta, r.mastery});
    }
  } else {
    const auto cohort = gen_cohort(config.cohort);
    bank.irt = cohort.irt;
    item_ids = padded_ids('q', config.cohort.n_items);
    learner_ids = padded_ids('s', config.cohort.n_students);
    for (std::size_t i = 0; i < learner_ids.size(); ++i) {
      const auto row = cohort.mastery.row(i);
      examinees.push_back({cohort.theta[i], BinaryVector(row.begin(), row.end())});
    }
  }

  const std::size_t n = examinees.size();
  std::vector<CatTranscript> transcripts(n);
  parallel_for(n, config.threads, [&](std::size_t i) {
    transcripts[i] = run_cat(examinees[i], bank, config.cat, mix_seed(config.seed, "cat", i));
  });

  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::size_t> reasons;
  double items_total = 0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = transcripts[i];
    std::string administered;
    for (std::size_t p = 0; p < t.items.size(); ++p) {
      if (p) administered += ';';
      administered += item_ids[t.items[p]];
    }
    rows.push_back({learner_ids[i], format_number(examinees[i].theta),
                    format_number(t.theta_hat()), format_number(t.se()),
                    std::to_string(t.items.size()), t.stop_reason, administered});
    ++reasons[t.stop_reason];
    items_total += static_cast<double>(t.items.size());
    if (std::abs(t.theta_hat() - examinees[i].theta) <= 3 * t.se()) ++within;
  }

  Artifacts files{prepare(out, "cat_transcripts.csv"), out / "cat_summary.json"};
  write_csv(files[0],
            {"learner_id", "theta_true", "theta_hat", "se", "n_items", "stop_reason", "items"},
            rows, provenance_of(config));
  write_json(files[1],
             with_meta(config, {{"learners", n},
                                {"mean_items", n ? items_total / static_cast<double>(n) : 0.0},
                                {"stop_reasons", reasons},
                                {"within_3se", n ? static_cast<double>(within) /
                                                       static_cast<double>(n)
                                                 : 0.0}}));
  return files;
}

Artifacts run_assign(const RunConfig& config, const CommandInputs& in, const fs::path& out) {
  const auto d = load_assign_inputs(config, in);
  const auto result = assign_cohort(d.learners, d.content, d.prereqs, config, config.solver);

  json slates = json::array();
  json uncovered = json::array();
  for (const auto& s : result.slates) {
    slates.push_back(slate_to_json(s, d.content));
    for (std::size_t k = 0; k < s.slack.size(); ++k) {
      if (s.slack[k] > 0) uncovered.push_back({{"learner_id", s.learner_id}, {"skill", k + 1}});
    }
  }
  json certificate = json::array();
  for (const auto& p : result.certificate) {
    certificate.push_back({{"learner_id", p.learner_id}, {"skill", p.skill + 1}});
  }

  Artifacts files{prepare(out, "slates.json"), out / "slack_report.json"};
  write_json(files[0], with_meta(config, {{"solver", config.solver}, {"slates", slates}}));
  write_json(files[1], with_meta(config, {{"uncovered", uncovered},
                                          {"uncoverable", certificate},
                                          {"uncovered_count", uncovered.size()}}));

  if (in.gd_trace) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < result.relaxed.size(); ++i) {
      if (!result.relaxed[i]) continue;
      const auto& r = *result.relaxed[i];
      for (std::size_t t = 0; t < r.loss_path.size(); ++t) {
        rows.push_back({d.learners[i].id(), std::to_string(t), format_number(r.loss_path[t]),
                        t < r.grad_norm_path.size() ? format_number(r.grad_norm_path[t])
                                                    : ""});
      }
    }
    files.push_back(out / "gd_trace.csv");
    write_csv(files.back(), {"learner_id", "iter", "loss", "grad_norm"}, rows,
              provenance_of(config));
  }
  return files;
}

Artifacts run_evaluate(const RunConfig& config, const CommandInputs& in, const fs::path& out) {
  const auto d = load_assign_inputs(config, in);
  const auto doc = read_json(need(in.slates, "slates"));
  if (!doc.contains("slates") || !doc["slates"].is_array()) {
    throw Error("bad_file", "slates file has no 'slates' array");
  }
  std::vector<AssignmentSlate> slates;
  for (const auto& s : doc["slates"]) slates.push_back(slate_from_json(s, d.content));
  if (slates.size() != d.learners.size()) {
    throw Error("learner_mismatch",
                fmt::format("{} slates for {} learners", slates.size(), d.learners.size()));
  }
  auto report = evaluate(slates, d.learners, d.content, config.penalty_w1, config.penalty_w2);
  report.solver = doc.value("solver", report.solver);

  Artifacts files{prepare(out, "report.json")};
  write_json(files[0], with_meta(config, {{"report", report_to_json(report)}}));
  return files;
}

std::vector<CompareRow> compare_sweep(const RunConfig& config) {
  CohortSpec cohort_spec = config.cohort;
  const auto cohort = gen_cohort(cohort_spec);
  const auto ids = padded_ids('s', cohort_spec.n_students);
  const double budget = config.compare.time_budget_min > 0
                            ? config.compare.time_budget_min
                            : static_cast<double>(cohort_spec.n_skills) *
                                  config.content.duration_max;
  std::vector<LearnerRecord> records;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = cohort.mastery.row(i);
    records.push_back({ids[i], cohort.theta[i], BinaryVector(row.begin(), row.end()),
                       std::nullopt, budget, std::nullopt});
  }

  std::vector<CompareRow> rows;
  for (std::size_t size : config.compare.pool_sizes) {
    ContentPoolSpec spec = config.content;
    spec.n_content = size;
    spec.n_skills = cohort_spec.n_skills;
    spec.seed = mix_seed(config.seed, "pool", size);
    const auto content = gen_content_pool(spec);
    const auto learners = make_learners(records, config, content.size());
    const PrereqGraph prereqs(spec.n_skills, {});
    for (const char* solver : {"gd", "greedy"}) {
      const auto result = assign_cohort(learners, content, prereqs, config, solver);
      auto report =
          evaluate(result.slates, learners, content, config.penalty_w1, config.penalty_w2);
      report.solver = solver;
      rows.push_back({size, solver, std::move(report)});
    }
  }
  return rows;
}

Artifacts run_compare(const RunConfig& config, const fs::path& out) {
  const auto sweep = compare_sweep(config);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : sweep) {
    const auto& m = r.report;
    rows.push_back({"simulation", std::to_string(r.pool_size), r.solver,
                    format_number(m.satisfactory_rate), format_number(m.gain_decay.mean),
                    format_number(m.gain_decay.sd), format_number(m.utility.mean),
                    format_number(m.utility.sd), format_number(m.total_penalty),
                    std::to_string(m.categories.fully_covered),
                    std::to_string(m.categories.over_covered),
                    std::to_string(m.categories.unsatisfied),
                    std::to_string(m.categories.non_used),
                    std::to_string(m.unique_content_assigned)});
  }
  Artifacts files{prepare(out, "metrics.csv")};
  write_csv(files[0],
            {"scenario", "pool_size", "solver", "satisfactory_rate", "gain_decay_mean",
             "gain_decay_sd", "utility_mean", "utility_sd", "total_penalty", "fully_covered",
             "over_covered", "unsatisfied", "non_used", "unique_content"},
            rows, provenance_of(config));
  return files;
}

Artifacts run_oracle(const RunConfig& config, const CommandInputs& in, const fs::path& out) {
  const auto d = load_assign_inputs(config, in);
  OracleOptions options;
  options.weights = config.weights;
  options.similarity = config.similarity;
  options.min_forms = config.diversity_min_forms;
  if (d.learners.size() > options.limits.max_learners) {
    throw Error("too_many_learners",
                fmt::format("oracle accepts at most {} learners, got {}",
                            options.limits.max_learners, d.learners.size()));
  }
  const std::size_t n = d.learners.size();
  std::vector<OracleResult> results(n);
  parallel_for(n, config.threads, [&](std::size_t i) {
    const auto pool =
        build_pool(d.learners[i], d.content, d.prereqs, config.similarity, d.learners[i].window());
    results[i] = solve_exact(d.learners[i], pool, d.content, d.prereqs, options);
  });

  json entries = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({{"value", results[i].value},
                       {"capped_coverage", results[i].capped},
                       {"feasible_subsets", results[i].feasible_subsets},
                       {"slate", slate_to_json(oracle_slate(d.learners[i], results[i], d.content),
                                               d.content)}});
  }
  Artifacts files{prepare(out, "oracle.json")};
  write_json(files[0], with_meta(config, {{"results", entries}}));
  return files;
}

}  // namespace remedy
