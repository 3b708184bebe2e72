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

// Regime law and the greedy-then-gradient hybrid.

#ifndef REMEDY_HYBRID_HPP_
#define REMEDY_HYBRID_HPP_

#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "remedy/feasibility.hpp"
#include "remedy/gradient.hpp"
#include "remedy/greedy.hpp"

namespace remedy {

enum class SolverKind { kGreedy, kGradient, kHybrid };
enum class PolicyMode { kAuto, kForceGreedy, kForceGradient, kForceHybrid };

std::string_view to_string(SolverKind kind) noexcept;  // greedy | gd | hybrid
SolverKind parse_solver(std::string_view token);
PolicyMode parse_policy_mode(std::string_view token);
std::string_view to_string(PolicyMode mode) noexcept;

struct RegimePolicy {
  double rho_star = 0.5;
  double lambda_budget_ms = std::numeric_limits<double>::infinity();
  double lambda_star_ms = 50.0;
  PolicyMode mode = PolicyMode::kAuto;
  bool cohort_median = false;  // switch on the cohort-median richness

  void validate() const;
};

struct SolverChoice {
  SolverKind kind = SolverKind::kGreedy;
  std::string rationale;
};

SolverChoice choose_solver(double rho, const RegimePolicy& policy);
inline SolverChoice choose_solver(const RichnessScore& rho, const RegimePolicy& policy) {
  return choose_solver(rho.composite, policy);
}

// Greedy, then gradient warm-started from the greedy picks. Returns the
// refined slate only when its slack-penalized objective is strictly higher
// and it leaves no more slack than greedy.
AssignmentSlate solve_hybrid(const LearnerState& learner, const AdmissiblePool& pool,
                             std::span<const ContentItem> content,
                             const PrereqGraph& prereqs, const GreedyConfig& greedy,
                             const GradientConfig& gradient);

}  // namespace remedy

#endif  // REMEDY_HYBRID_HPP_
