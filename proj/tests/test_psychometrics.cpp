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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "oracles.hpp"
#include "remedy/psychometrics.hpp"
#include "remedy/synth.hpp"

using namespace remedy;
using oracle::error_code;

namespace {

BinaryMatrix rows(std::initializer_list<BinaryVector> r) {
  BinaryMatrix m(r.size(), r.begin()->size());
  std::size_t i = 0;
  for (const auto& v : r) {
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[j];
    ++i;
  }
  return m;
}

// Posterior mean and sd on the same grid, written out directly.
std::pair<double, double> eap_oracle(const BinaryVector& y,
                                     const std::vector<ItemParams3PL>& items) {
  double num = 0, den = 0, sq = 0;
  for (int g = 0; g < 61; ++g) {
    const double t = -4.0 + 8.0 * g / 60.0;
    double w = std::exp(-0.5 * t * t);
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double p = oracle::p3pl(t, items[j].discrimination, items[j].difficulty,
                                    items[j].guessing);
      w *= y[j] ? p : 1 - p;
    }
    num += w * t;
    sq += w * t * t;
    den += w;
  }
  const double mean = num / den;
  return {mean, std::sqrt(std::max(0.0, sq / den - mean * mean))};
}

}  // namespace

TEST_CASE("3PL probability examples") {
  const ItemParams3PL item{1.7, 0.4, 0.2};
  CHECK(p_3pl(0.4, item) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(p_3pl(0.4 + 10 / 1.7, item) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(p_3pl(-50, item) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(error_code([&] { p_3pl(std::nan(""), item); }) != "none");
}

TEST_CASE("slope-intercept item 16 at theta 0 is logistic(1.107)") {
  const auto item = ItemParams3PL::from_slope_intercept(2.451, 1.107);
  CHECK(item.difficulty == doctest::Approx(-1.107 / 2.451));
  CHECK(p_3pl(0.0, item) == doctest::Approx(1.0 / (1.0 + std::exp(-1.107))).epsilon(1e-12));
}

TEST_CASE("3PL is strictly increasing in theta") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> a(0.3, 3), b(-2, 2), c(0, 0.3);
  for (int rep = 0; rep < 200; ++rep) {
    const ItemParams3PL item{a(gen), b(gen), c(gen)};
    double prev = p_3pl(-6, item);
    for (double t = -5.9; t <= 6; t += 0.1) {
      const double p = p_3pl(t, item);
      CHECK(p > prev);
      prev = p;
    }
  }
}

TEST_CASE("3PL information matches the numeric derivative oracle") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> a(0.5, 2.5), b(-2, 2), c(0, 0.3), t(-3, 3);
  for (int rep = 0; rep < 500; ++rep) {
    const ItemParams3PL item{a(gen), b(gen), c(gen)};
    const double theta = t(gen);
    CHECK(information_3pl(theta, item) ==
          doctest::Approx(oracle::info3pl_numeric(theta, item.discrimination,
                                                  item.difficulty, item.guessing))
              .epsilon(1e-5));
  }
}

TEST_CASE("ideal response examples") {
  CHECK(eta_ideal(BinaryVector{1, 1, 0}, BinaryVector{1, 1, 0}));
  CHECK_FALSE(eta_ideal(BinaryVector{1, 0, 0}, BinaryVector{1, 1, 0}));
  CHECK(eta_ideal(BinaryVector{0, 0, 0}, BinaryVector{0, 0, 0}));
  CHECK(error_code([] { eta_ideal(BinaryVector{1}, BinaryVector{1, 0}); }) ==
        "dimension_mismatch");
}

TEST_CASE("DINA probability examples") {
  CHECK(p_dina(BinaryVector{1}, BinaryVector{1}, {0.1, 0.3}) == doctest::Approx(0.9));
  CHECK(p_dina(BinaryVector{0}, BinaryVector{1}, {0.1, 0.28}) == doctest::Approx(0.28));
  // Item 16 of the reference calibration.
  CHECK(p_dina(BinaryVector{1, 1}, BinaryVector{1, 0}, {0.034, 0.337}) ==
        doctest::Approx(0.966).epsilon(1e-12));
}

TEST_CASE("DINA takes exactly two values over mastery vectors") {
  const BinaryVector q{1, 0, 1};
  std::set<double> seen;
  for (std::size_t c = 0; c < 8; ++c) seen.insert(p_dina(class_profile(c, 3), q, {0.15, 0.22}));
  CHECK(seen.size() == 2);
}

TEST_CASE("noise-free DINA simulation") {
  const QMatrix q(rows({{1, 0}, {0, 1}, {1, 1}}));
  const std::vector<ItemParamsDINA> quiet(3, {0.0, 0.0});
  const auto y = simulate_responses(rows({{1, 1}, {1, 0}}), q, quiet, 1);
  CHECK(y(0, 0) == 1);
  CHECK(y(0, 1) == 1);
  CHECK(y(0, 2) == 1);
  CHECK(y(1, 1) == 0);
  CHECK(y(1, 2) == 0);
}

TEST_CASE("simulated correct rate follows 1 - slip") {
  const QMatrix q(rows({{1}}));
  BinaryMatrix profiles(10000, 1, 1);
  const std::vector<ItemParamsDINA> p{{0.25, 0.1}};
  const auto y = simulate_responses(profiles, q, p, 99);
  double correct = 0;
  for (auto v : y.data()) correct += v;
  CHECK(correct / 10000.0 == doctest::Approx(0.75).epsilon(0.02 / 0.75));
}

TEST_CASE("EAP directional and symmetry checks") {
  std::vector<ItemParams3PL> easy(5, {1.5, -1.5, 0.0});
  CHECK(estimate_theta_eap(BinaryVector(5, 1), easy).theta > 0);
  std::vector<ItemParams3PL> sym{{1.2, -1, 0}, {1.2, 1, 0}, {1.2, -0.5, 0}, {1.2, 0.5, 0}};
  CHECK(std::abs(estimate_theta_eap(BinaryVector{1, 0, 1, 0}, sym).theta) < 8.0 / 60.0);
  CHECK(error_code([] { estimate_theta_eap(BinaryVector{}, std::vector<ItemParams3PL>{}); }) ==
        "empty_responses");
}

TEST_CASE("EAP agrees with a direct quadrature oracle") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> a(0.7, 2.2), b(-2, 2), c(0, 0.25);
  std::bernoulli_distribution coin(0.5);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<ItemParams3PL> items;
    BinaryVector y;
    for (int j = 0; j < 12; ++j) {
      items.push_back({a(gen), b(gen), c(gen)});
      y.push_back(coin(gen));
    }
    const auto est = estimate_theta_eap(y, items);
    const auto [mean, sd] = eap_oracle(y, items);
    CHECK(est.theta == doctest::Approx(mean).epsilon(1e-9));
    CHECK(est.se == doctest::Approx(std::max(sd, (8.0 / 60.0) / std::sqrt(12.0))).epsilon(1e-9));
  }
}

TEST_CASE("EAP on 30 items covers theta = 1 within 3 se in 99% of replications") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> a(1.0, 2.5), b(-1.5, 2.5);
  std::vector<ItemParams3PL> items;
  for (int j = 0; j < 30; ++j) items.push_back({a(gen), b(gen), 0.0});
  int inside = 0;
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 1000; ++rep) {
    BinaryVector y;
    for (const auto& it : items) y.push_back(u(gen) < p_3pl(1.0, it));
    const auto est = estimate_theta_eap(y, items);
    inside += std::abs(est.theta - 1.0) <= 3 * est.se;
  }
  CHECK(inside >= 990);
}

TEST_CASE("item selection examples") {
  CHECK(select_next_item(0.3, {}, std::vector<ItemParams3PL>{{1, 2, 0}}) == 0);
  const std::vector<ItemParams3PL> two{{1.2, 0.5, 0}, {1.2, 2.5, 0}};
  CHECK(select_next_item(0.5, {}, two) == 0);
  CHECK(select_next_item(0.5, {0}, two) == 1);
  CHECK(error_code([&] { select_next_item(0.0, {0, 1}, two); }) == "bank_exhausted");
}

TEST_CASE("item selection matches an information scan") {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> a(0.5, 2.5), b(-2.5, 2.5), c(0, 0.25), t(-2, 2);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<ItemParams3PL> bank;
    for (int j = 0; j < 20; ++j) bank.push_back({a(gen), b(gen), c(gen)});
    std::set<std::size_t> used{static_cast<std::size_t>(rep % 20)};
    const double theta = t(gen);
    std::size_t best = 0;
    double best_info = -1;
    for (std::size_t j = 0; j < bank.size(); ++j) {
      if (used.count(j)) continue;
      const double info = oracle::info3pl_numeric(theta, bank[j].discrimination,
                                                  bank[j].difficulty, bank[j].guessing);
      if (info > best_info) {
        best_info = info;
        best = j;
      }
    }
    CHECK(select_next_item(theta, used, bank) == best);
  }
}

TEST_CASE("CAT stop rules") {
  CohortSpec spec;
  spec.n_students = 10;
  spec.seed = 3;
  const auto cohort = gen_cohort(spec);
  CatBank bank{cohort.irt, {}, std::nullopt};
  CatConfig one;
  one.max_items = 1;
  auto t = run_cat({0.2, {}}, bank, one, 1);
  CHECK(t.items.size() == 1);
  CHECK(t.stop_reason == "max_items");

  CatConfig loose;
  loose.se_threshold = 1e6;
  t = run_cat({0.2, {}}, bank, loose, 1);
  CHECK(t.items.size() == 1);
  CHECK(t.stop_reason == "se_threshold");

  CatConfig tight;
  tight.se_threshold = 1e-9;
  tight.max_items = 1000;
  CatBank small{std::vector<ItemParams3PL>(cohort.irt.begin(), cohort.irt.begin() + 4), {},
                std::nullopt};
  t = run_cat({0.2, {}}, small, tight, 1);
  CHECK(t.items.size() == 4);
  CHECK(t.stop_reason == "bank_exhausted");

  CHECK(error_code([&] { run_cat({0, {1, 0}}, bank, {}, 1, CatResponseModel::kDina); }) ==
        "invalid_bank");
}

TEST_CASE("CAT is deterministic and uses fewer than 30 items on average") {
  CohortSpec spec;
  spec.n_students = 200;
  spec.seed = 21;
  const auto cohort = gen_cohort(spec);
  CatBank bank{cohort.irt, {}, std::nullopt};
  double items = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const CatExaminee who{cohort.theta[i], {}};
    const auto t = run_cat(who, bank, {}, i);
    CHECK(t == run_cat(who, bank, {}, i));
    std::set<std::size_t> unique(t.items.begin(), t.items.end());
    CHECK(unique.size() == t.items.size());
    items += static_cast<double>(t.items.size());
  }
  CHECK(items / 200.0 < 30.0);
}

TEST_CASE("EM on a single learner and item returns the enumerated posterior") {
  const QMatrix q(rows({{1, 0}}));
  const auto fit = fit_dina_em(rows({{1}}), q);
  REQUIRE(fit.class_posterior.cols() == 4);
  double mass = 0;
  std::vector<double> joint(4);
  for (std::size_t c = 0; c < 4; ++c) {
    const auto profile = class_profile(c, 2);
    const double p = p_dina(profile, q.row(0), fit.items[0]);
    joint[c] = fit.class_prior[c] * p;
    mass += joint[c];
  }
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(fit.class_posterior(0, c) == doctest::Approx(joint[c] / mass).epsilon(1e-9));
  }
}

TEST_CASE("EM recovers noise-free profiles and never lowers the likelihood") {
  CohortSpec spec;
  spec.n_students = 600;
  spec.n_items = 40;
  spec.seed = 12;
  auto cohort = gen_cohort(spec);
  const std::vector<ItemParamsDINA> quiet(spec.n_items, {0.001, 0.001});
  const auto y = simulate_responses(cohort.mastery, cohort.qmatrix, quiet, 5);
  const auto fit = fit_dina_em(y, cohort.qmatrix);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < spec.n_students; ++i) {
    hits += std::equal(fit.map_profiles.row(i).begin(), fit.map_profiles.row(i).end(),
                       cohort.mastery.row(i).begin());
    double sum = 0;
    for (double p : fit.class_posterior.row(i)) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(static_cast<double>(hits) >= 0.99 * static_cast<double>(spec.n_students));
  for (std::size_t t = 1; t < fit.log_likelihood.size(); ++t) {
    CHECK(fit.log_likelihood[t] >= fit.log_likelihood[t - 1] - 1e-9);
  }
}

TEST_CASE("EM flags untagged items and rejects bad input") {
  const QMatrix q(rows({{1, 0}, {0, 0}, {0, 1}}));
  const auto fit = fit_dina_em(rows({{1, 0, 1}, {0, 1, 0}, {1, 1, 1}}), q);
  CHECK(fit.untagged_items == std::vector<std::size_t>{1});
  CHECK(error_code([&] { fit_dina_em(BinaryMatrix(0, 3), q); }) == "empty_responses");
  CHECK(error_code([&] { fit_dina_em(BinaryMatrix(2, 2), q); }) == "dimension_mismatch");
}

TEST_CASE("mean guess drawn from the Beta(7, 18) prior is near 0.28") {
  CohortSpec spec;
  spec.n_items = 2000;
  spec.n_students = 1;
  spec.seed = 77;
  const auto cohort = gen_cohort(spec);
  double g = 0, s = 0;
  for (const auto& p : cohort.dina) {
    g += p.guess;
    s += p.slip;
  }
  CHECK(g / 2000 == doctest::Approx(0.28).epsilon(0.01 / 0.28));
  CHECK(s / 2000 == doctest::Approx(0.25).epsilon(0.01 / 0.25));
}
