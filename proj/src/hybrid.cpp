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

#include "remedy/hybrid.hpp"

#include <cmath>

#include <fmt/format.h>

#include "remedy/objectives.hpp"

namespace remedy {

std::string_view to_string(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::kGreedy:
      return "greedy";
    case SolverKind::kGradient:
      return "gd";
    case SolverKind::kHybrid:
      return "hybrid";
  }
  return "greedy";
}

SolverKind parse_solver(std::string_view token) {
  if (token == "greedy" || token == "gh") return SolverKind::kGreedy;
  if (token == "gd" || token == "gradient") return SolverKind::kGradient;
  if (token == "hybrid") return SolverKind::kHybrid;
  throw Error("invalid_config", fmt::format("unknown solver '{}'", token));
}

std::string_view to_string(PolicyMode mode) noexcept {
  switch (mode) {
    case PolicyMode::kAuto:
      return "auto";
    case PolicyMode::kForceGreedy:
      return "force_greedy";
    case PolicyMode::kForceGradient:
      return "force_gradient";
    case PolicyMode::kForceHybrid:
      return "force_hybrid";
  }
  return "auto";
}

PolicyMode parse_policy_mode(std::string_view token) {
  if (token == "auto") return PolicyMode::kAuto;
  if (token == "force_greedy") return PolicyMode::kForceGreedy;
  if (token == "force_gradient") return PolicyMode::kForceGradient;
  if (token == "force_hybrid") return PolicyMode::kForceHybrid;
  throw Error("invalid_config", fmt::format("unknown policy mode '{}'", token));
}

void RegimePolicy::validate() const {
  if (!(rho_star >= 0 && rho_star <= 1)) {
    throw Error("invalid_config", "rho_star must lie in [0, 1]");
  }
  if (!(lambda_star_ms > 0) || !(lambda_budget_ms > 0)) {
    throw Error("invalid_config", "latency thresholds must be positive");
  }
}

SolverChoice choose_solver(double rho, const RegimePolicy& policy) {
  policy.validate();
  switch (policy.mode) {
    case PolicyMode::kForceGreedy:
      return {SolverKind::kGreedy, "forced: greedy"};
    case PolicyMode::kForceGradient:
      return {SolverKind::kGradient, "forced: gd"};
    case PolicyMode::kForceHybrid:
      return {SolverKind::kHybrid, "forced: hybrid"};
    case PolicyMode::kAuto:
      break;
  }
  const double budget = policy.lambda_budget_ms;
  const double star = policy.lambda_star_ms;
  if (rho < policy.rho_star) {
    return {SolverKind::kGreedy,
            fmt::format("greedy: rho {:.3f} < rho* {:.3f}", rho, policy.rho_star)};
  }
  if (budget < star) {
    return {SolverKind::kGreedy,
            fmt::format("greedy: latency budget {} ms < lambda* {} ms", budget, star)};
  }
  if (budget >= 4 * star) {
    return {SolverKind::kGradient,
            fmt::format("gd: rho {:.3f} >= rho* {:.3f} and budget {} ms >= 4 lambda* {} ms",
                        rho, policy.rho_star, budget, 4 * star)};
  }
  return {SolverKind::kHybrid,
          fmt::format("hybrid: rho {:.3f} >= rho* {:.3f}, lambda* {} ms <= budget {} ms "
                      "< 4 lambda* {} ms",
                      rho, policy.rho_star, star, budget, 4 * star)};
}

AssignmentSlate solve_hybrid(const LearnerState& learner, const AdmissiblePool& pool,
                             std::span<const ContentItem> content,
                             const PrereqGraph& prereqs, const GreedyConfig& greedy,
                             const GradientConfig& gradient) {
  AssignmentSlate base = solve_greedy(learner, pool, content, prereqs, greedy);
  GradientRun refined =
      solve_gradient(learner, pool, content, prereqs, gradient, base.selected);
  const auto& w = greedy.weights;
  const double z_base = slate_objective(learner, base.selected, content, w);
  const double z_refined = slate_objective(learner, refined.slate.selected, content, w);
  const bool take = z_refined > z_base && refined.slate.slack_mass() <= base.slack_mass();
  AssignmentSlate out = take ? std::move(refined.slate) : std::move(base);
  out.solver = "hybrid";
  out.rationale = fmt::format("hybrid: kept {} slate (Z greedy {:.6f}, Z refined {:.6f})",
                              take ? "refined" : "greedy", z_base, z_refined);
  out.trace.push_back({"note", std::nullopt, "", {}, take ? z_refined : z_base, 0,
                       out.rationale});
  return out;
}

}  // namespace remedy
