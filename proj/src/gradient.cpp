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

#include "remedy/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace remedy {

GradientConfig GradientConfig::from_weights(const ObjectiveWeights& weights) {
  GradientConfig c;
  c.alpha = weights.alpha;
  c.beta = weights.beta;
  c.epsilon = weights.epsilon;
  c.omega = weights.omega;
  return c;
}

void GradientConfig::validate() const {
  const double nonneg[] = {alpha, beta, omega, lambda_time, lambda_card,
                           lambda_diff, lambda_pre, lambda_div};
  for (double v : nonneg) {
    if (!(v >= 0)) throw Error("invalid_config", "gradient weights must be >= 0");
  }
  if (!(epsilon > 0)) throw Error("invalid_config", "epsilon must be positive");
  if (!(tau_cov > 0)) throw Error("invalid_config", "tau_cov must be positive");
  if (!(eta_step > 0)) throw Error("invalid_config", "eta_step must be positive");
  if (!(grad_tol > 0)) throw Error("invalid_config", "grad_tol must be positive");
  if (!(round_threshold > 0 && round_threshold < 1)) {
    throw Error("invalid_config", "round_threshold must lie in (0, 1)");
  }
  if (window_tolerance < 0) {
    throw Error("invalid_config", "window_tolerance must be >= 0");
  }
}

RelaxedProblem::RelaxedProblem(const LearnerState& learner,
                               std::vector<std::size_t> ids,
                               std::span<const ContentItem> content,
                               const PrereqGraph& prereqs,
                               std::vector<ContentPair> similar,
                               const GradientConfig& config)
    : learner_(learner),
      ids_(std::move(ids)),
      content_(content),
      prereqs_(prereqs),
      config_(config) {
  config_.validate();
  std::map<std::size_t, std::size_t> position;
  for (std::size_t t = 0; t < ids_.size(); ++t) position[ids_[t]] = t;
  for (const auto& [a, b] : similar) {
    auto pa = position.find(a);
    auto pb = position.find(b);
    if (pa != position.end() && pb != position.end()) {
      pairs_.emplace_back(pa->second, pb->second);
    }
  }
  const double lo = encode(learner.window().lower) - config_.window_tolerance;
  const double hi = encode(learner.window().upper) + config_.window_tolerance;
  for (std::size_t j : ids_) {
    const auto& item = content_[j];
    if (item.coverage.size() != learner.skills()) {
      throw DimensionError("skills", learner.skills(), item.coverage.size());
    }
    const int dist = level_distance(item.level, learner.preferred());
    unit_cost_.push_back(1.0 + config_.epsilon * item.duration_minutes +
                         config_.omega * dist);
    const double d = item.difficulty_index;
    const double over = std::max(0.0, d - hi);
    const double under = std::max(0.0, lo - d);
    phi_.push_back(over * over + under * under);
  }
}

void RelaxedProblem::check_box(std::span<const double> x) const {
  if (x.size() != ids_.size()) throw DimensionError("content", ids_.size(), x.size());
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error("out_of_box", fmt::format("relaxed value {} outside [0, 1]", v));
    }
  }
}

std::vector<double> RelaxedProblem::skill_mass(std::span<const double> x) const {
  std::vector<double> z(learner_.skills(), 0.0);
  for (std::size_t t = 0; t < ids_.size(); ++t) {
    const auto& cov = content_[ids_[t]].coverage;
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += cov[k] * x[t];
  }
  return z;
}

LossTerms RelaxedProblem::terms(std::span<const double> x) const {
  check_box(x);
  const auto& c = config_;
  const auto z = skill_mass(x);
  LossTerms out;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (!learner_.has_gap(k)) continue;
    if (c.surrogate == CoverageSurrogate::kExponential) {
      out.coverage -= c.alpha * (1.0 - std::exp(-c.tau_cov * z[k]));
    } else {
      const double r = std::max(0.0, 1.0 - z[k]);
      out.coverage += 0.5 * c.alpha * (r * r - 1.0);
    }
  }
  double minutes = 0;
  double count = 0;
  for (std::size_t t = 0; t < ids_.size(); ++t) {
    out.burden += c.beta * unit_cost_[t] * x[t];
    out.diff += c.lambda_diff * phi_[t] * x[t];
    minutes += content_[ids_[t]].duration_minutes * x[t];
    count += x[t];
  }
  const double over_time = std::max(0.0, minutes - learner_.time_budget());
  out.time = c.lambda_time * over_time * over_time;
  if (learner_.slate_cap() != kUnboundedSlate) {
    const double over_card =
        std::max(0.0, count - static_cast<double>(learner_.slate_cap()));
    out.card = c.lambda_card * over_card * over_card;
  }
  for (const auto& [from, to] : prereqs_.edges()) {
    const double h = z[to] - learner_.mastery()[from] - z[from];
    if (h > 0) out.pre += c.lambda_pre * h * h;
  }
  for (const auto& [a, b] : pairs_) out.div += c.lambda_div * x[a] * x[b];
  return out;
}

std::vector<double> RelaxedProblem::gradient(std::span<const double> x) const {
  check_box(x);
  const auto& c = config_;
  const auto z = skill_mass(x);
  const std::size_t skills = z.size();

  // dL/dz_k from the coverage and prerequisite terms.
  std::vector<double> dz(skills, 0.0);
  for (std::size_t k = 0; k < skills; ++k) {
    if (!learner_.has_gap(k)) continue;
    if (c.surrogate == CoverageSurrogate::kExponential) {
      dz[k] -= c.alpha * c.tau_cov * std::exp(-c.tau_cov * z[k]);
    } else {
      dz[k] -= c.alpha * std::max(0.0, 1.0 - z[k]);
    }
  }
  for (const auto& [from, to] : prereqs_.edges()) {
    const double h = z[to] - learner_.mastery()[from] - z[from];
    if (h > 0) {
      dz[to] += 2.0 * c.lambda_pre * h;
      dz[from] -= 2.0 * c.lambda_pre * h;
    }
  }

  double minutes = 0;
  double count = 0;
  for (std::size_t t = 0; t < ids_.size(); ++t) {
    minutes += content_[ids_[t]].duration_minutes * x[t];
    count += x[t];
  }
  const double over_time = std::max(0.0, minutes - learner_.time_budget());
  double over_card = 0;
  if (learner_.slate_cap() != kUnboundedSlate) {
    over_card = std::max(0.0, count - static_cast<double>(learner_.slate_cap()));
  }

  std::vector<double> g(ids_.size(), 0.0);
  for (std::size_t t = 0; t < ids_.size(); ++t) {
    const auto& item = content_[ids_[t]];
    double v = c.beta * unit_cost_[t] + c.lambda_diff * phi_[t];
    for (std::size_t k = 0; k < skills; ++k) v += item.coverage[k] * dz[k];
    v += 2.0 * c.lambda_time * over_time * item.duration_minutes;
    v += 2.0 * c.lambda_card * over_card;
    g[t] = v;
  }
  for (const auto& [a, b] : pairs_) {
    g[a] += c.lambda_div * x[b];
    g[b] += c.lambda_div * x[a];
  }
  return g;
}

OptimizeResult optimize(const RelaxedProblem& problem, const GradientConfig& config,
                        std::optional<std::vector<double>> start) {
  config.validate();
  OptimizeResult out;
  out.x = start ? std::move(*start) : std::vector<double>(problem.size(), 0.0);
  if (out.x.size() != problem.size()) {
    throw DimensionError("content", problem.size(), out.x.size());
  }
  for (double& v : out.x) v = std::clamp(v, 0.0, 1.0);

  auto checked_loss = [&](std::span<const double> x) {
    const auto t = problem.terms(x);
    const double total = t.total();
    if (!std::isfinite(total)) {
      throw Error("non_finite_loss",
                  fmt::format("loss is not finite: coverage={} burden={} time={} "
                              "card={} diff={} pre={} div={}",
                              t.coverage, t.burden, t.time, t.card, t.diff, t.pre,
                              t.div));
    }
    return total;
  };

  double eta = config.eta_step;
  double current = checked_loss(out.x);
  out.loss_path.push_back(current);
  std::vector<double> next(out.x.size());
  out.stop_reason = "max_iters";
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    const auto g = problem.gradient(out.x);
    double norm = 0;
    for (std::size_t t = 0; t < g.size(); ++t) {
      const bool pinned = (out.x[t] <= 0.0 && g[t] > 0) || (out.x[t] >= 1.0 && g[t] < 0);
      if (!pinned) norm = std::max(norm, std::abs(g[t]));
    }
    out.grad_norm_path.push_back(norm);
    if (norm < config.grad_tol) {
      out.stop_reason = "converged";
      break;
    }
    double candidate = 0;
    while (true) {
      for (std::size_t t = 0; t < g.size(); ++t) {
        next[t] = std::clamp(out.x[t] - eta * g[t], 0.0, 1.0);
      }
      candidate = checked_loss(next);
      if (candidate <= current + 1e-12) break;
      eta *= 0.5;
      if (eta < 1e-14) break;
    }
    if (eta < 1e-14) {
      out.stop_reason = "step_underflow";
      break;
    }
    out.x.swap(next);
    current = candidate;
    out.loss_path.push_back(current);
    out.iterations = it + 1;
  }
  return out;
}

namespace {

struct Repair {
  std::vector<std::size_t> selected;  // content indices
  std::map<std::size_t, double> value;
  std::span<const ContentItem> content;
  std::vector<TraceEntry> log;

  double x(std::size_t j) const {
    auto it = value.find(j);
    return it == value.end() ? 0.0 : it->second;
  }

  // Removal order: smallest relaxed value, then longest, then highest index.
  bool drops_before(std::size_t a, std::size_t b) const {
    if (x(a) != x(b)) return x(a) < x(b);
    const double la = content[a].duration_minutes;
    const double lb = content[b].duration_minutes;
    if (la != lb) return la > lb;
    return a > b;
  }

  void drop(std::size_t j, const char* reason) {
    selected.erase(std::find(selected.begin(), selected.end(), j));
    log.push_back({"drop", j, content[j].id, {}, x(j), 0, reason});
  }

  double minutes() const {
    double m = 0;
    for (std::size_t j : selected) m += content[j].duration_minutes;
    return m;
  }

  bool has(std::size_t j) const {
    return std::find(selected.begin(), selected.end(), j) != selected.end();
  }
};

}  // namespace

AssignmentSlate round_and_repair(std::span<const double> x,
                                 const RelaxedProblem& problem,
                                 const LearnerState& learner,
                                 const AdmissiblePool& pool,
                                 std::span<const ContentItem> content,
                                 const PrereqGraph& prereqs,
                                 const GradientConfig& config) {
  if (x.size() != problem.size()) throw DimensionError("content", problem.size(), x.size());
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error("out_of_box", fmt::format("relaxed value {} outside [0, 1]", v));
    }
  }
  const auto& ids = problem.ids();
  Repair r{{}, {}, content, {}};
  for (std::size_t t = 0; t < ids.size(); ++t) {
    r.value[ids[t]] = x[t];
    if (x[t] >= config.round_threshold) r.selected.push_back(ids[t]);
  }

  // Difficulty window.
  for (std::size_t j : std::vector<std::size_t>(r.selected)) {
    if (!pool.window.contains(content[j].difficulty_index)) r.drop(j, "difficulty_window");
  }
  // Near-duplicates: keep the stronger member of each selected pair.
  for (const auto& [a, b] : pool.similar) {
    if (r.has(a) && r.has(b)) r.drop(r.drops_before(a, b) ? a : b, "duplicate");
  }
  // Time and slate budgets.
  while (!r.selected.empty() && (r.minutes() > learner.time_budget() ||
                                 r.selected.size() > learner.slate_cap())) {
    const auto victim = *std::min_element(
        r.selected.begin(), r.selected.end(),
        [&](std::size_t a, std::size_t b) { return r.drops_before(a, b); });
    r.drop(victim, "budget");
  }
  // Prerequisites, visiting targeted skills in reverse topological order.
  if (!prereqs.empty()) {
    const auto order = prereqs.topological_order();
    while (!prerequisite_ok(r.selected, learner, prereqs, content)) {
      bool dropped = false;
      for (auto it = order.rbegin(); it != order.rend() && !dropped; ++it) {
        const std::size_t target = *it;
        for (std::size_t from : prereqs.prerequisites_of(target)) {
          int lhs = 0;
          int rhs = learner.mastery()[from];
          for (std::size_t j : r.selected) {
            lhs += content[j].coverage[target];
            rhs += content[j].coverage[from];
          }
          if (lhs <= rhs) continue;
          std::optional<std::size_t> victim;
          for (std::size_t j : r.selected) {
            if (!content[j].covers(target)) continue;
            if (!victim || r.drops_before(j, *victim)) victim = j;
          }
          r.drop(*victim, "prerequisite");
          dropped = true;
          break;
        }
      }
    }
  }

  const std::size_t skills = learner.skills();
  auto covered = covered_skills(r.selected, content, skills);
  std::vector<double> z(skills, 0.0);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    for (std::size_t k = 0; k < skills; ++k) z[k] += content[ids[t]].coverage[k] * x[t];
  }
  for (std::size_t k = 0; k < skills; ++k) {
    if (!learner.has_gap(k) || covered[k]) continue;
    // Best relaxed cover for this gap, ties to the lowest index.
    std::vector<std::size_t> covers;
    for (std::size_t j : ids) {
      if (content[j].covers(k) && !r.has(j)) covers.push_back(j);
    }
    std::stable_sort(covers.begin(), covers.end(),
                     [&](std::size_t a, std::size_t b) { return r.x(a) > r.x(b); });
    bool added = false;
    if (config.coverage_rescue && z[k] >= config.round_threshold) {
      for (std::size_t j : covers) {
        if (r.minutes() + content[j].duration_minutes > learner.time_budget() ||
            r.selected.size() + 1 > learner.slate_cap() ||
            !pool.window.contains(content[j].difficulty_index)) {
          continue;
        }
        const bool clash = std::any_of(pool.similar.begin(), pool.similar.end(),
                                       [&](const ContentPair& p) {
                                         return (p.first == j && r.has(p.second)) ||
                                                (p.second == j && r.has(p.first));
                                       });
        if (clash) continue;
        r.selected.push_back(j);
        if (!prerequisite_ok(r.selected, learner, prereqs, content)) {
          r.selected.pop_back();
          continue;
        }
        r.log.push_back({"add", j, content[j].id, {k}, r.x(j), 0, "coverage_rescue"});
        covered = covered_skills(r.selected, content, skills);
        added = true;
        break;
      }
    }
    if (!added && !covers.empty()) {
      // Record why the strongest relaxed cover did not survive.
      const std::size_t j = covers.front();
      const bool logged = std::any_of(r.log.begin(), r.log.end(), [&](const TraceEntry& e) {
        return e.event == "drop" && e.content == j;
      });
      if (!logged) r.log.push_back({"drop", j, content[j].id, {k}, r.x(j), 0, "rounding"});
    }
  }

  std::stable_sort(r.selected.begin(), r.selected.end(), [&](std::size_t a, std::size_t b) {
    if (r.x(a) != r.x(b)) return r.x(a) > r.x(b);
    return a < b;
  });

  AssignmentSlate slate;
  slate.learner_id = learner.id();
  slate.solver = "gd";
  slate.selected = r.selected;
  BinaryVector open = learner.gaps();
  for (std::size_t j : slate.selected) {
    TraceEntry e{"pick", j, content[j].id, {}, r.x(j),
                 level_distance(content[j].level, learner.preferred()), "rounded"};
    for (std::size_t k = 0; k < skills; ++k) {
      if (open[k] && content[j].coverage[k]) {
        e.skills.push_back(k);
        open[k] = 0;
      }
    }
    slate.trace.push_back(std::move(e));
  }
  for (auto& e : r.log) slate.trace.push_back(std::move(e));
  refresh_slate(slate, learner, content);
  for (std::size_t k = 0; k < skills; ++k) {
    if (slate.slack[k] == 0) continue;
    const bool coverable = std::any_of(pool.admissible_ids.begin(), pool.admissible_ids.end(),
                                       [&](std::size_t j) { return content[j].covers(k); });
    slate.trace.push_back(
        {"slack", std::nullopt, "", {k}, z[k], 0, coverable ? "repair" : "no_candidates"});
  }
  slate.rationale = "gd";
  return slate;
}

GradientRun solve_gradient(const LearnerState& learner, const AdmissiblePool& pool,
                           std::span<const ContentItem> content,
                           const PrereqGraph& prereqs, const GradientConfig& config,
                           std::span<const std::size_t> warm_start) {
  RelaxedProblem problem(learner, pool.admissible_ids, content, prereqs, pool.similar,
                         config);
  std::optional<std::vector<double>> start;
  if (!warm_start.empty()) {
    start.emplace(problem.size(), 0.0);
    for (std::size_t t = 0; t < problem.size(); ++t) {
      if (std::find(warm_start.begin(), warm_start.end(), problem.ids()[t]) !=
          warm_start.end()) {
        (*start)[t] = 1.0;
      }
    }
  }
  GradientRun run;
  run.relaxed = optimize(problem, config, std::move(start));
  run.slate =
      round_and_repair(run.relaxed.x, problem, learner, pool, content, prereqs, config);
  run.slate.trace.insert(run.slate.trace.begin(),
                         {"note", std::nullopt, "", {}, run.relaxed.loss_path.back(), 0,
                          fmt::format("optimize: {} after {} iterations",
                                      run.relaxed.stop_reason, run.relaxed.iterations)});
  return run;
}

}  // namespace remedy
