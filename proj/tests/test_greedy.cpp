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

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "remedy/greedy.hpp"

using namespace remedy;
using oracle::error_code;

namespace {

LearnerState learner(BinaryVector mastery, double budget = 100, std::size_t cap = 10,
                     Level preferred = Level::kMedium) {
  return LearnerState("L", 0.0, std::move(mastery), budget, cap,
                      DifficultyWindow{Level::kBasic, Level::kHard}, preferred);
}

AdmissiblePool pool_for(const LearnerState& l, const std::vector<ContentItem>& content,
                        const PrereqGraph& g = {}) {
  return build_pool(l, content, g, SimilarityPolicy{});
}

struct Instance {
  LearnerState learner;
  std::vector<ContentItem> content;
};

Instance random_instance(std::mt19937_64& gen, std::size_t m, std::size_t k,
                         double budget_lo, double budget_hi) {
  std::vector<ContentItem> content;
  for (std::size_t j = 0; j < m; ++j) content.push_back(oracle::random_item(gen, j, k));
  std::uniform_real_distribution<double> b(budget_lo, budget_hi);
  std::uniform_int_distribution<int> lvl(0, 2);
  auto mastery = oracle::random_mastery(gen, k, 0.3);
  return {LearnerState("L", 0.0, std::move(mastery), b(gen), 12,
                       DifficultyWindow{Level::kBasic, Level::kHard}, level_from_index(lvl(gen))),
          std::move(content)};
}

}  // namespace

TEST_CASE("score examples") {
  ObjectiveWeights w;
  w.epsilon = 0.1;
  const auto item = ContentItem::make("a", {1, 1, 0}, 10, Level::kMedium);
  const auto l = learner({0, 0, 0});
  CHECK(greedy_score(item, BinaryVector{1, 1, 1}, BinaryVector{0, 0, 0}, l, w, 0) ==
        doctest::Approx(1.0));

  ObjectiveWeights v;
  v.epsilon = 1e-300;  // must stay positive; contributes nothing measurable
  v.omega = 0;
  v.gamma_overlap = 1;
  const auto seen = ContentItem::make("b", {1, 0, 0}, 5, Level::kMedium);
  CHECK(greedy_score(seen, BinaryVector{0, 1, 1}, BinaryVector{1, 0, 0}, l, v, 0) ==
        doctest::Approx(-1.0));

  const auto hard = ContentItem::make("h", {1, 0, 0}, 5, Level::kHard);
  CHECK(error_code([&] {
          greedy_score(hard, BinaryVector{1, 1, 1}, BinaryVector{0, 0, 0},
                       learner({0, 0, 0}, 100, 10, Level::kBasic), w, 1);
        }) == "tier_violation");
}

TEST_CASE("score agrees with the direct formula on random configurations") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  std::uniform_int_distribution<int> lvl(0, 2);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto item = oracle::random_item(gen, 0, 6);
    const auto uncovered = oracle::random_mastery(gen, 6);
    const auto covered = oracle::random_mastery(gen, 6);
    const Level pref = level_from_index(lvl(gen));
    const auto l = learner(BinaryVector(6, 0), 100, 10, pref);
    ObjectiveWeights w;
    w.epsilon = u(gen);
    w.omega = u(gen);
    w.gamma_overlap = u(gen);
    double gain = 0, overlap = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      gain += uncovered[k] && item.coverage[k];
      overlap += covered[k] && item.coverage[k];
    }
    const double dist = std::abs(static_cast<int>(item.level) - static_cast<int>(pref));
    const double want = gain - (w.epsilon * item.duration_minutes + w.omega * dist +
                                w.gamma_overlap * overlap);
    CHECK(std::abs(greedy_score(item, uncovered, covered, l, w, 2) - want) <= 1e-12);
  }
}

TEST_CASE("single item covering the single gap") {
  std::vector<ContentItem> content{ContentItem::make("a", {0, 1}, 5, Level::kMedium)};
  const auto l = learner({1, 0});
  const auto s = solve_greedy(l, pool_for(l, content), content, PrereqGraph());
  CHECK(s.selected == std::vector<std::size_t>{0});
  CHECK(s.slack == std::vector<double>{0, 0});
  CHECK(s.total_minutes == 5.0);
}

TEST_CASE("empty pool leaves every gap in slack with a no_candidates trace") {
  const std::vector<ContentItem> content;
  const auto l = learner({1, 0, 0});
  const auto s = solve_greedy(l, pool_for(l, content), content, PrereqGraph());
  CHECK(s.selected.empty());
  CHECK(s.slack == std::vector<double>{0, 1, 1});
  CHECK(std::any_of(s.trace.begin(), s.trace.end(),
                    [](const TraceEntry& e) { return e.reason == "no_candidates"; }));
}

TEST_CASE("tier escalation opens farther levels only when needed") {
  std::vector<ContentItem> content{
      ContentItem::make("m", {1, 0, 0}, 10, Level::kMedium),
      ContentItem::make("b", {1, 1, 0}, 5, Level::kBasic),
      ContentItem::make("h", {0, 0, 1}, 5, Level::kHard)};
  const auto l = learner({0, 0, 0}, 100, 10, Level::kMedium);
  const auto s = solve_greedy(l, pool_for(l, content), content, PrereqGraph());
  // Tier 0 first even though the basic item scores higher overall.
  REQUIRE(s.trace.size() >= 3);
  CHECK(s.trace[0].content_id == "m");
  CHECK(s.trace[0].tier == 0);
  CHECK(s.trace[1].tier == 1);
  CHECK(s.slack == std::vector<double>{0, 0, 0});

  GreedyConfig strict;
  strict.fallback_enabled = false;
  const auto t = solve_greedy(l, pool_for(l, content), content, PrereqGraph(), strict);
  for (const auto& e : t.trace) CHECK(e.tier == 0);
}

TEST_CASE("prerequisites hold after every pick") {
  const PrereqGraph g(3, {{0, 1}, {1, 2}});
  std::vector<ContentItem> content{
      ContentItem::make("c2", {0, 0, 1}, 5, Level::kMedium),
      ContentItem::make("c1", {0, 1, 0}, 5, Level::kMedium),
      ContentItem::make("c0", {1, 0, 0}, 5, Level::kMedium)};
  const auto l = learner({0, 0, 0});
  const auto s = solve_greedy(l, pool_for(l, content, g), content, g);
  CHECK(s.selected == std::vector<std::size_t>{2, 1, 0});
  for (std::size_t n = 1; n <= s.selected.size(); ++n) {
    const std::vector<std::size_t> prefix(s.selected.begin(), s.selected.begin() + n);
    CHECK(prerequisite_ok(prefix, l, g, content));
  }
}

TEST_CASE("pick-sequence invariants on random instances") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 500; ++rep) {
    auto [l, content] = random_instance(gen, 10, 6, 10, 60);
    const PrereqGraph g(6, rep % 2 ? std::vector<PrereqGraph::Edge>{{0, 1}, {2, 3}}
                                   : std::vector<PrereqGraph::Edge>{});
    const auto pool = pool_for(l, content, g);
    const auto s = solve_greedy(l, pool, content, g);
    CHECK(s.total_minutes <= l.time_budget() + 1e-9);
    CHECK(s.selected.size() <= l.slate_cap());
    CHECK(s.total_minutes == doctest::Approx(oracle::minutes(s.selected, content)));

    // Prefixes are feasible and strictly add coverage.
    const auto gains = oracle::replay_gains(l, s.selected, content);
    double minutes = 0;
    for (std::size_t n = 0; n < s.selected.size(); ++n) {
      CHECK(gains[n] >= 1);
      minutes += content[s.selected[n]].duration_minutes;
      CHECK(minutes <= l.time_budget() + 1e-9);
      const std::vector<std::size_t> prefix(s.selected.begin(), s.selected.begin() + n + 1);
      CHECK(prerequisite_ok(prefix, l, g, content));
    }

    int last = 0;
    for (const auto& e : s.trace) {
      if (e.event != "pick") continue;
      CHECK(e.tier >= last);
      last = e.tier;
    }

    // Slack sits exactly on gaps the slate leaves open.
    const auto touched = oracle::touched_gaps(l, s.selected, content);
    for (std::size_t k = 0; k < 6; ++k) {
      const bool open = l.mastery()[k] == 0 && !touched.count(k);
      CHECK(s.slack[k] == (open ? 1.0 : 0.0));
    }

    CHECK(solve_greedy(l, pool, content, g) == s);
  }
}

TEST_CASE("capped coverage reaches (1 - 1/e) of the exact optimum") {
  std::mt19937_64 gen(2024);
  const double ratio = 1.0 - std::exp(-1.0);
  int worst_misses = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto [l, content] = random_instance(gen, 12, 8, 10, 45);
    const auto pool = pool_for(l, content);
    const auto s = solve_greedy(l, pool, content, PrereqGraph());
    const double got = oracle::capped(l, s.selected, content);
    const double best = oracle::best_capped_bruteforce(l, pool.nonredundant_ids, content);
    CHECK(got >= ratio * best - 1e-9);
    worst_misses += got < best;
  }
  MESSAGE("instances below the exact optimum: " << worst_misses);
}

TEST_CASE("safeguard recovers coverage a ratio-blind pick gives away") {
  // Tier 0 offers only item 0, which covers two gaps and fills the budget;
  // items 1 and 2 together cover all three within it.
  ObjectiveWeights w;
  w.epsilon = 0.01;
  std::vector<ContentItem> content{
      ContentItem::make("big", {1, 1, 0}, 20, Level::kMedium),
      ContentItem::make("x", {1, 0, 1}, 10, Level::kBasic),
      ContentItem::make("y", {0, 1, 0}, 10, Level::kMedium)};
  const auto l = learner({0, 0, 0}, 20);
  GreedyConfig plain;
  plain.weights = w;
  plain.knapsack_safeguard = false;
  const auto pool = pool_for(l, content);
  const auto without = solve_greedy(l, pool, content, PrereqGraph(), plain);
  CHECK(oracle::capped(l, without.selected, content) == 2.0);
  GreedyConfig guarded = plain;
  guarded.knapsack_safeguard = true;
  const auto with = solve_greedy(l, pool, content, PrereqGraph(), guarded);
  CHECK(oracle::capped(l, with.selected, content) == 3.0);
  CHECK(with.trace.front().reason.find("knapsack_safeguard") == 0);
}
