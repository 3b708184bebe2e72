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

// Response models (3PL, DINA), response simulation, EAP ability
// estimation, maximum-information adaptive testing and DINA calibration
// by marginal EM.

#ifndef REMEDY_PSYCHOMETRICS_HPP_
#define REMEDY_PSYCHOMETRICS_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "remedy/model.hpp"

namespace remedy {

struct ItemParams3PL {
  double discrimination = 1.0;  // a > 0
  double difficulty = 0.0;      // b
  double guessing = 0.0;        // 0 <= c < 1

  // Slope-intercept form: logit = a * theta + d, so b = -d / a.
  static ItemParams3PL from_slope_intercept(double a, double d, double c = 0.0);
  void validate() const;
};

struct ItemParamsDINA {
  double slip = 0.2;
  double guess = 0.2;

  void validate() const;
  // 1 - s > g; a violation is legal but worth reporting.
  bool monotone() const { return 1.0 - slip > guess; }
};

struct ThetaGrid {
  double lower = -4.0;
  double upper = 4.0;
  std::size_t points = 61;
};

struct CatConfig {
  double se_threshold = 0.2;
  std::size_t max_items = 30;
  ThetaGrid grid;

  void validate() const;
};

double p_3pl(double theta, const ItemParams3PL& item);
// Exact Fisher information of the 3PL item at theta.
double information_3pl(double theta, const ItemParams3PL& item);

bool eta_ideal(std::span<const std::uint8_t> mastery,
               std::span<const std::uint8_t> q_row);
double p_dina(std::span<const std::uint8_t> mastery,
              std::span<const std::uint8_t> q_row, const ItemParamsDINA& item);

// Draws y_ij = [u < P(Y_ij = 1)] with u ~ Uniform(0,1) from the learner's
// own substream, so rows are independent of generation order.
BinaryMatrix simulate_responses(const BinaryMatrix& profiles,
                                const QMatrix& qmatrix,
                                std::span<const ItemParamsDINA> params,
                                std::uint64_t seed);

struct AbilityEstimate {
  double theta = 0;
  double se = 1;
};

// EAP under a standard-normal prior on the configured quadrature grid.
// `responses[r]` answers `items[r]`.
AbilityEstimate estimate_theta_eap(std::span<const std::uint8_t> responses,
                                   std::span<const ItemParams3PL> items,
                                   const ThetaGrid& grid = {});

// Maximum-information item among those not yet administered; ties go to
// the lowest index.
std::size_t select_next_item(double theta_hat,
                             const std::set<std::size_t>& administered,
                             std::span<const ItemParams3PL> bank);

enum class CatResponseModel { kIrt, kDina };

struct CatExaminee {
  double theta = 0;
  BinaryVector mastery;  // used by the DINA response model
};

struct CatBank {
  std::vector<ItemParams3PL> irt;
  std::vector<ItemParamsDINA> dina;  // empty unless the DINA model is used
  std::optional<QMatrix> qmatrix;
};

struct CatTranscript {
  std::vector<std::size_t> items;
  BinaryVector responses;
  std::vector<double> theta_path;  // estimate after each response
  std::vector<double> se_path;
  std::string stop_reason;  // se_threshold | max_items | bank_exhausted

  double theta_hat() const { return theta_path.empty() ? 0.0 : theta_path.back(); }
  double se() const { return se_path.empty() ? 1.0 : se_path.back(); }
  friend bool operator==(const CatTranscript&, const CatTranscript&) = default;
};

CatTranscript run_cat(const CatExaminee& examinee, const CatBank& bank,
                      const CatConfig& config, std::uint64_t seed,
                      CatResponseModel model = CatResponseModel::kIrt);

struct EmConfig {
  double tolerance = 1e-6;
  std::size_t max_iterations = 500;
  double initial_slip = 0.2;
  double initial_guess = 0.2;
  double clamp_low = 0.001;
  double clamp_high = 0.999;
};

struct DinaFit {
  std::vector<ItemParamsDINA> items;
  Grid<double> class_posterior;  // N x 2^K
  std::vector<double> class_prior;
  BinaryMatrix map_profiles;     // N x K
  Grid<double> skill_posterior;  // N x K marginal P(mastery)
  std::vector<double> log_likelihood;  // one entry per E-step
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<std::size_t> clamped_items;
  std::vector<std::size_t> untagged_items;
  std::vector<std::size_t> non_monotone_items;
};

// Marginal-likelihood EM over all 2^K latent classes (K <= 20).
DinaFit fit_dina_em(const BinaryMatrix& responses, const QMatrix& qmatrix,
                    const EmConfig& config = {});

// Profile (bit k = skill k) to binary vector and back.
BinaryVector class_profile(std::size_t cls, std::size_t skills);

}  // namespace remedy

#endif  // REMEDY_PSYCHOMETRICS_HPP_
