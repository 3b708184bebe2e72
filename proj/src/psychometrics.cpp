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

#include "remedy/psychometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "remedy/rng.hpp"

namespace remedy {
namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> grid_points(const ThetaGrid& grid) {
  if (grid.points < 2 || !(grid.upper > grid.lower)) {
    throw Error("invalid_grid", "theta grid needs >= 2 points and upper > lower");
  }
  std::vector<double> pts(grid.points);
  const double step =
      (grid.upper - grid.lower) / static_cast<double>(grid.points - 1);
  for (std::size_t q = 0; q < grid.points; ++q) {
    pts[q] = grid.lower + step * static_cast<double>(q);
  }
  return pts;
}

}  // namespace

ItemParams3PL ItemParams3PL::from_slope_intercept(double a, double d, double c) {
  ItemParams3PL item{a, a != 0 ? -d / a : 0.0, c};
  item.validate();
  return item;
}

void ItemParams3PL::validate() const {
  if (!(discrimination > 0) || !std::isfinite(discrimination)) {
    throw Error("invalid_item", "3PL discrimination must be positive");
  }
  if (!std::isfinite(difficulty)) {
    throw Error("invalid_item", "3PL difficulty must be finite");
  }
  if (!(guessing >= 0 && guessing < 1)) {
    throw Error("invalid_item", "3PL guessing must lie in [0, 1)");
  }
}

void ItemParamsDINA::validate() const {
  if (!(slip > 0 && slip < 1) || !(guess > 0 && guess < 1)) {
    throw Error("invalid_item", "DINA slip and guess must lie in (0, 1)");
  }
}

void CatConfig::validate() const {
  if (!(se_threshold > 0)) {
    throw Error("invalid_config", "se_threshold must be positive");
  }
  if (max_items < 1) throw Error("invalid_config", "max_items must be >= 1");
  (void)grid_points(grid);
}

double p_3pl(double theta, const ItemParams3PL& item) {
  if (!std::isfinite(theta)) {
    throw Error("invalid_theta", "theta must be finite");
  }
  const double c = item.guessing;
  return c + (1.0 - c) * logistic(item.discrimination * (theta - item.difficulty));
}

double information_3pl(double theta, const ItemParams3PL& item) {
  const double p = p_3pl(theta, item);
  const double c = item.guessing;
  const double a = item.discrimination;
  const double q = 1.0 - p;
  if (p <= 0 || q <= 0) return 0.0;
  const double ratio = (p - c) / (1.0 - c);
  return a * a * (q / p) * ratio * ratio;
}

bool eta_ideal(std::span<const std::uint8_t> mastery,
               std::span<const std::uint8_t> q_row) {
  if (mastery.size() != q_row.size()) {
    throw DimensionError("skills", q_row.size(), mastery.size());
  }
  for (std::size_t k = 0; k < q_row.size(); ++k) {
    if (q_row[k] && !mastery[k]) return false;
  }
  return true;
}

double p_dina(std::span<const std::uint8_t> mastery,
              std::span<const std::uint8_t> q_row, const ItemParamsDINA& item) {
  return eta_ideal(mastery, q_row) ? 1.0 - item.slip : item.guess;
}

BinaryMatrix simulate_responses(const BinaryMatrix& profiles,
                                const QMatrix& qmatrix,
                                std::span<const ItemParamsDINA> params,
                                std::uint64_t seed) {
  if (profiles.cols() != qmatrix.skills()) {
    throw DimensionError("skills", qmatrix.skills(), profiles.cols());
  }
  if (params.size() != qmatrix.items()) {
    throw DimensionError("items", qmatrix.items(), params.size());
  }
  BinaryMatrix y(profiles.rows(), qmatrix.items());
  for (std::size_t i = 0; i < profiles.rows(); ++i) {
    Rng rng(seed, "responses", i);
    const auto mastery = profiles.row(i);
    for (std::size_t j = 0; j < qmatrix.items(); ++j) {
      const double p = p_dina(mastery, qmatrix.row(j), params[j]);
      y(i, j) = rng.uniform() < p ? 1 : 0;
    }
  }
  return y;
}

AbilityEstimate estimate_theta_eap(std::span<const std::uint8_t> responses,
                                   std::span<const ItemParams3PL> items,
                                   const ThetaGrid& grid) {
  if (responses.empty()) {
    throw Error("empty_responses", "EAP needs at least one response");
  }
  if (responses.size() != items.size()) {
    throw DimensionError("responses", items.size(), responses.size());
  }
  const auto pts = grid_points(grid);
  std::vector<double> logpost(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) {
    double lp = -0.5 * pts[q] * pts[q];
    for (std::size_t r = 0; r < responses.size(); ++r) {
      const double p = p_3pl(pts[q], items[r]);
      lp += responses[r] ? std::log(p) : std::log1p(-p);
    }
    logpost[q] = lp;
  }
  const double peak = *std::max_element(logpost.begin(), logpost.end());
  double mass = 0;
  double first = 0;
  double second = 0;
  for (std::size_t q = 0; q < pts.size(); ++q) {
    const double w = std::exp(logpost[q] - peak);
    mass += w;
    first += w * pts[q];
    second += w * pts[q] * pts[q];
  }
  const double mean = first / mass;
  const double var = std::max(second / mass - mean * mean, 0.0);
  // A posterior concentrated on one node still has grid-resolution spread.
  const double floor_se =
      (grid.upper - grid.lower) / static_cast<double>(grid.points - 1) /
      std::sqrt(12.0);
  return {mean, std::max(std::sqrt(var), floor_se)};
}

std::size_t select_next_item(double theta_hat,
                             const std::set<std::size_t>& administered,
                             std::span<const ItemParams3PL> bank) {
  std::size_t best = bank.size();
  double best_info = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bank.size(); ++j) {
    if (administered.contains(j)) continue;
    const double info = information_3pl(theta_hat, bank[j]);
    if (info > best_info) {
      best_info = info;
      best = j;
    }
  }
  if (best == bank.size()) {
    throw Error("bank_exhausted", "no unadministered item remains");
  }
  return best;
}

CatTranscript run_cat(const CatExaminee& examinee, const CatBank& bank,
                      const CatConfig& config, std::uint64_t seed,
                      CatResponseModel model) {
  config.validate();
  if (bank.irt.empty()) throw Error("empty_bank", "CAT needs at least one item");
  if (model == CatResponseModel::kDina) {
    if (!bank.qmatrix || bank.dina.size() != bank.irt.size() ||
        bank.qmatrix->items() != bank.irt.size()) {
      throw Error("invalid_bank",
                  "DINA response model needs a Q-matrix and DINA params per item");
    }
  }
  Rng rng(seed, "cat", 0);
  CatTranscript t;
  std::set<std::size_t> administered;
  std::vector<ItemParams3PL> seen;
  double theta_hat = 0.0;
  while (true) {
    const std::size_t j = select_next_item(theta_hat, administered, bank.irt);
    administered.insert(j);
    const double p =
        model == CatResponseModel::kIrt
            ? p_3pl(examinee.theta, bank.irt[j])
            : p_dina(examinee.mastery, bank.qmatrix->row(j), bank.dina[j]);
    const std::uint8_t y = rng.uniform() < p ? 1 : 0;
    t.items.push_back(j);
    t.responses.push_back(y);
    seen.push_back(bank.irt[j]);
    const auto est = estimate_theta_eap(t.responses, seen, config.grid);
    theta_hat = est.theta;
    t.theta_path.push_back(est.theta);
    t.se_path.push_back(est.se);
    if (est.se <= config.se_threshold) {
      t.stop_reason = "se_threshold";
      break;
    }
    if (t.items.size() >= config.max_items) {
      t.stop_reason = "max_items";
      break;
    }
    if (administered.size() == bank.irt.size()) {
      t.stop_reason = "bank_exhausted";
      break;
    }
  }
  return t;
}

BinaryVector class_profile(std::size_t cls, std::size_t skills) {
  BinaryVector v(skills);
  for (std::size_t k = 0; k < skills; ++k) v[k] = (cls >> k) & 1U;
  return v;
}

DinaFit fit_dina_em(const BinaryMatrix& responses, const QMatrix& qmatrix,
                    const EmConfig& config) {
  const std::size_t n = responses.rows();
  const std::size_t items = qmatrix.items();
  const std::size_t skills = qmatrix.skills();
  if (responses.cols() != items) {
    throw DimensionError("items", items, responses.cols());
  }
  if (skills > 20) {
    throw Error("too_many_skills", "class enumeration supports K <= 20");
  }
  if (n == 0) throw Error("empty_responses", "EM needs at least one learner");
  for (auto v : responses.data()) {
    if (v > 1) throw Error("non_binary", "responses must be 0/1");
  }
  const std::size_t classes = std::size_t{1} << skills;

  DinaFit fit;
  fit.untagged_items = qmatrix.untagged_items();

  // Untagged items carry no conjunctive requirement we can estimate from;
  // they enter the likelihood through the guess rate only.
  BinaryMatrix eta(classes, items);
  for (std::size_t c = 0; c < classes; ++c) {
    const auto profile = class_profile(c, skills);
    for (std::size_t j = 0; j < items; ++j) {
      eta(c, j) = !qmatrix.untagged(j) && eta_ideal(profile, qmatrix.row(j));
    }
  }

  fit.items.assign(items, ItemParamsDINA{config.initial_slip, config.initial_guess});
  fit.class_prior.assign(classes, 1.0 / static_cast<double>(classes));
  fit.class_posterior = Grid<double>(n, classes);

  std::vector<double> r1(items), i1(items), r0(items), i0(items);
  std::vector<double> loglik(classes);
  std::vector<std::uint8_t> clamped(items, 0);

  for (std::size_t iter = 0;; ++iter) {
    // E-step.
    std::vector<double> log1ms(items), logs(items), logg(items), log1mg(items);
    for (std::size_t j = 0; j < items; ++j) {
      log1ms[j] = std::log1p(-fit.items[j].slip);
      logs[j] = std::log(fit.items[j].slip);
      logg[j] = std::log(fit.items[j].guess);
      log1mg[j] = std::log1p(-fit.items[j].guess);
    }
    double total_ll = 0;
    std::fill(r1.begin(), r1.end(), 0.0);
    std::fill(i1.begin(), i1.end(), 0.0);
    std::fill(r0.begin(), r0.end(), 0.0);
    std::fill(i0.begin(), i0.end(), 0.0);
    std::vector<double> next_prior(classes, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = responses.row(i);
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < classes; ++c) {
        double ll = std::log(fit.class_prior[c]);
        const auto e = eta.row(c);
        for (std::size_t j = 0; j < items; ++j) {
          ll += e[j] ? (y[j] ? log1ms[j] : logs[j]) : (y[j] ? logg[j] : log1mg[j]);
        }
        loglik[c] = ll;
        peak = std::max(peak, ll);
      }
      double mass = 0;
      for (std::size_t c = 0; c < classes; ++c) {
        loglik[c] = std::exp(loglik[c] - peak);
        mass += loglik[c];
      }
      total_ll += peak + std::log(mass);
      auto post = fit.class_posterior.row(i);
      for (std::size_t c = 0; c < classes; ++c) {
        post[c] = loglik[c] / mass;
        next_prior[c] += post[c];
      }
      for (std::size_t c = 0; c < classes; ++c) {
        const double w = post[c];
        if (w == 0) continue;
        const auto e = eta.row(c);
        for (std::size_t j = 0; j < items; ++j) {
          if (e[j]) {
            i1[j] += w;
            r1[j] += w * y[j];
          } else {
            i0[j] += w;
            r0[j] += w * y[j];
          }
        }
      }
    }
    fit.log_likelihood.push_back(total_ll);
    const std::size_t t = fit.log_likelihood.size();
    if (t >= 2 &&
        std::abs(fit.log_likelihood[t - 1] - fit.log_likelihood[t - 2]) <
            config.tolerance) {
      fit.converged = true;
      break;
    }
    if (iter >= config.max_iterations) break;

    // M-step.
    auto clamp = [&](double v, std::size_t j) {
      if (v < config.clamp_low || v > config.clamp_high) {
        clamped[j] = 1;
        return std::clamp(v, config.clamp_low, config.clamp_high);
      }
      clamped[j] = 0;
      return v;
    };
    for (std::size_t j = 0; j < items; ++j) {
      bool hit = false;
      if (i0[j] > 0) {
        fit.items[j].guess = clamp(r0[j] / i0[j], j);
        hit = clamped[j];
      }
      if (i1[j] > 0) {
        fit.items[j].slip = clamp(1.0 - r1[j] / i1[j], j);
        hit = hit || clamped[j];
      }
      clamped[j] = hit;
    }
    for (std::size_t c = 0; c < classes; ++c) {
      fit.class_prior[c] =
          std::max(next_prior[c] / static_cast<double>(n), 1e-300);
    }
    fit.iterations = iter + 1;
  }

  for (std::size_t j = 0; j < items; ++j) {
    if (clamped[j]) fit.clamped_items.push_back(j);
    if (!fit.items[j].monotone()) fit.non_monotone_items.push_back(j);
  }
  fit.map_profiles = BinaryMatrix(n, skills);
  fit.skill_posterior = Grid<double>(n, skills, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto post = fit.class_posterior.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (post[c] > post[best]) best = c;
    }
    for (std::size_t k = 0; k < skills; ++k) {
      fit.map_profiles(i, k) = (best >> k) & 1U;
      double pk = 0;
      for (std::size_t c = 0; c < classes; ++c) {
        if ((c >> k) & 1U) pk += post[c];
      }
      fit.skill_posterior(i, k) = pk;
    }
  }
  return fit;
}

}  // namespace remedy
