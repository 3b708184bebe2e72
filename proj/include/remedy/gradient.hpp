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

// Continuous relaxation over [0,1]^M: smooth capped coverage with
// quadratic penalty barriers, projected gradient descent, threshold
// rounding and feasibility repair.

#ifndef REMEDY_GRADIENT_HPP_
#define REMEDY_GRADIENT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remedy/feasibility.hpp"
#include "remedy/model.hpp"

namespace remedy {

enum class CoverageSurrogate {
  kExponential,  // sigma(z) = 1 - exp(-tau z)
  kHinge,        // squared residual max(0, 1 - z)
};

struct GradientConfig {
  double alpha = 1.0;
  double beta = 0.1;
  double epsilon = 0.05;
  double omega = 0.25;
  double tau_cov = 3.0;
  double lambda_time = 10.0;
  double lambda_card = 10.0;
  double lambda_diff = 1.0;
  double lambda_pre = 10.0;
  double lambda_div = 1.0;
  double eta_step = 0.01;
  double grad_tol = 1e-5;
  std::size_t max_iters = 5000;
  double round_threshold = 0.5;
  CoverageSurrogate surrogate = CoverageSurrogate::kExponential;
  // Levels beyond the learner's window before the difficulty hinge engages.
  int window_tolerance = 1;
  // After repair, add the best relaxed cover for any gap whose relaxed
  // coverage reached the threshold but lost every item to rounding.
  bool coverage_rescue = true;

  static GradientConfig from_weights(const ObjectiveWeights& weights);
  void validate() const;
};

struct LossTerms {
  double coverage = 0;
  double burden = 0;
  double time = 0;
  double card = 0;
  double diff = 0;
  double pre = 0;
  double div = 0;
  double total() const { return coverage + burden + time + card + diff + pre + div; }
};

// The per-learner relaxed problem over the variables `ids` (content
// indices); x[t] is the relaxed indicator of content ids[t]. `content`
// must outlive the problem.
class RelaxedProblem {
 public:
  RelaxedProblem(const LearnerState& learner, std::vector<std::size_t> ids,
                 std::span<const ContentItem> content, const PrereqGraph& prereqs,
                 std::vector<ContentPair> similar, const GradientConfig& config);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::size_t>& ids() const noexcept { return ids_; }

  LossTerms terms(std::span<const double> x) const;
  double loss(std::span<const double> x) const { return terms(x).total(); }
  std::vector<double> gradient(std::span<const double> x) const;
  // Difficulty hinge phi(d_j) for variable t.
  double phi(std::size_t t) const { return phi_[t]; }

 private:
  void check_box(std::span<const double> x) const;
  std::vector<double> skill_mass(std::span<const double> x) const;

  LearnerState learner_;
  std::vector<std::size_t> ids_;
  std::span<const ContentItem> content_;
  PrereqGraph prereqs_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;  // positions in ids_
  GradientConfig config_;
  std::vector<double> unit_cost_;  // 1 + eps L + omega dist
  std::vector<double> phi_;
};

struct OptimizeResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  std::string stop_reason;  // converged | max_iters | step_underflow
  std::vector<double> loss_path;
  std::vector<double> grad_norm_path;  // projected-gradient inf-norm
};

OptimizeResult optimize(const RelaxedProblem& problem, const GradientConfig& config,
                        std::optional<std::vector<double>> start = std::nullopt);

AssignmentSlate round_and_repair(std::span<const double> x,
                                 const RelaxedProblem& problem,
                                 const LearnerState& learner,
                                 const AdmissiblePool& pool,
                                 std::span<const ContentItem> content,
                                 const PrereqGraph& prereqs,
                                 const GradientConfig& config);

struct GradientRun {
  AssignmentSlate slate;
  OptimizeResult relaxed;
};

// Builds the relaxed problem over the pool's admissible ids, optimizes,
// then rounds and repairs. `warm_start` lists content indices set to 1.
GradientRun solve_gradient(const LearnerState& learner, const AdmissiblePool& pool,
                           std::span<const ContentItem> content,
                           const PrereqGraph& prereqs, const GradientConfig& config,
                           std::span<const std::size_t> warm_start = {});

}  // namespace remedy

#endif  // REMEDY_GRADIENT_HPP_
