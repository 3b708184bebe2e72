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

#include "oracles.hpp"
#include "remedy/rng.hpp"
#include "remedy/synth.hpp"

using namespace remedy;
using oracle::error_code;

namespace {

std::size_t row_sum(std::span<const std::uint8_t> r) {
  std::size_t s = 0;
  for (auto v : r) s += v;
  return s;
}

}  // namespace

TEST_CASE("largest remainder keeps totals and breaks ties toward earlier entries") {
  const std::array<double, 3> mix{0.3, 0.5, 0.2};
  CHECK(largest_remainder(mix, 20) == std::vector<std::size_t>{6, 10, 4});
  CHECK(largest_remainder(mix, 5) == std::vector<std::size_t>{2, 2, 1});
  const std::array<double, 2> half{0.5, 0.5};
  CHECK(largest_remainder(half, 3) == std::vector<std::size_t>{2, 1});
  for (std::size_t n = 0; n < 50; ++n) {
    const auto c = largest_remainder(mix, n);
    CHECK(c[0] + c[1] + c[2] == n);
  }
}

TEST_CASE("rng substreams are reproducible and distinct") {
  Rng a(9, "x", 1), b(9, "x", 1), c(9, "x", 2), d(9, "y", 1);
  const double va = a.uniform();
  CHECK(va == b.uniform());
  CHECK(va != c.uniform());
  CHECK(va != d.uniform());
  CHECK(mix_seed(1, "pool", 5) == mix_seed(1, "pool", 5));
  CHECK(mix_seed(1, "pool", 5) != mix_seed(1, "pool", 10));
  Rng e(1);
  CHECK(e.uniform_real(2.0, 2.0) == 2.0);
}

TEST_CASE("Q-matrix single/multi split and determinism") {
  CohortSpec spec;
  spec.n_items = 10;
  spec.seed = 4;
  const auto q = gen_qmatrix(spec);
  std::size_t single = 0, multi = 0;
  for (std::size_t j = 0; j < q.items(); ++j) {
    const auto s = row_sum(q.row(j));
    if (s == 1) ++single;
    if (s >= 2) {
      ++multi;
      CHECK(s <= 3);
    }
  }
  CHECK(single == 6);
  CHECK(multi == 4);
  CHECK(gen_qmatrix(spec) == q);
}

TEST_CASE("Q-matrix column sums are positive across seeds") {
  CohortSpec spec;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    spec.seed = seed;
    const auto q = gen_qmatrix(spec);
    for (std::size_t k = 0; k < q.skills(); ++k) {
      std::size_t col = 0;
      for (std::size_t j = 0; j < q.items(); ++j) col += q(j, k);
      CHECK(col >= 1);
    }
  }
}

TEST_CASE("mastery rate one gives full mastery") {
  CohortSpec spec;
  spec.n_students = 50;
  spec.mastery_rate = 1.0;
  const auto c = gen_cohort(spec);
  for (auto v : c.mastery.data()) CHECK(v == 1);
}

TEST_CASE("mastery and guess draws match their generating laws") {
  CohortSpec spec;
  spec.n_students = 10000;
  spec.n_items = 10000;
  spec.seed = 17;
  const auto c = gen_cohort(spec);
  // A 0.01 band is about two standard errors per skill, so five skills
  // would miss it one run in five; per skill we allow three standard
  // errors and hold the pooled rate to 0.01.
  const double se = std::sqrt(0.6 * 0.4 / 10000.0);
  double pooled = 0;
  for (std::size_t k = 0; k < spec.n_skills; ++k) {
    double m = 0;
    for (std::size_t i = 0; i < spec.n_students; ++i) m += c.mastery(i, k);
    CHECK(std::abs(m / 10000.0 - 0.6) <= 3 * se);
    pooled += m;
  }
  CHECK(std::abs(pooled / 50000.0 - 0.6) <= 0.01);
  double g = 0;
  for (const auto& p : c.dina) g += p.guess;
  CHECK(std::abs(g / 10000.0 - 0.28) <= 0.02);
  CHECK(c.responses.rows() == 10000);
}

TEST_CASE("cohort generation is deterministic per seed") {
  CohortSpec spec;
  spec.n_students = 40;
  spec.seed = 8;
  const auto a = gen_cohort(spec);
  const auto b = gen_cohort(spec);
  CHECK(a.mastery == b.mastery);
  CHECK(a.responses == b.responses);
  CHECK(a.theta == b.theta);
  spec.seed = 9;
  CHECK_FALSE(gen_cohort(spec).responses == a.responses);
}

TEST_CASE("content pool of five covers every skill exactly by its union") {
  ContentPoolSpec spec;
  spec.n_content = 5;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    spec.seed = seed;
    const auto pool = gen_content_pool(spec);
    BinaryVector seen(5, 0);
    for (const auto& item : pool) {
      for (std::size_t k = 0; k < 5; ++k) seen[k] |= item.coverage[k];
    }
    CHECK(seen == BinaryVector(5, 1));
  }
}

TEST_CASE("content pool of twenty has the default level split") {
  ContentPoolSpec spec;
  spec.seed = 3;
  const auto pool = gen_content_pool(spec);
  std::array<int, 3> counts{};
  for (const auto& item : pool) ++counts[encode(item.level)];
  CHECK(counts[0] == 6);
  CHECK(counts[1] == 10);
  CHECK(counts[2] == 4);
}

TEST_CASE("durations stay in [5, 15] across seeds") {
  ContentPoolSpec spec;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    spec.seed = seed;
    for (const auto& item : gen_content_pool(spec)) {
      CHECK(item.duration_minutes >= 5.0);
      CHECK(item.duration_minutes <= 15.0);
    }
  }
}

TEST_CASE("durations follow the clipped log-normal law (KS at 0.01)") {
  ContentPoolSpec spec;
  spec.seed = 123;
  const std::size_t n = 10000;
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(draw_duration(spec, i));
  std::sort(x.begin(), x.end());
  auto cdf = [&](double v) {
    if (v < spec.duration_min) return 0.0;
    if (v >= spec.duration_max) return 1.0;
    const double z = (std::log(v) - spec.duration_mu) / spec.duration_sigma;
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
  };
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(x[i]);
    // Compare after the last copy of a tied value, so atoms count once.
    if (i + 1 == n || x[i + 1] != x[i]) {
      d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    // Left limit matters only off the atoms.
    if (x[i] > spec.duration_min && x[i] < spec.duration_max) {
      d = std::max(d, std::abs(static_cast<double>(i) / n - f));
    }
  }
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("content generation errors and form tags") {
  ContentPoolSpec spec;
  spec.n_content = 3;
  spec.n_skills = 5;
  CHECK(error_code([&] { gen_content_pool(spec); }) != "none");
  spec = {};
  spec.n_forms = 3;
  spec.seed = 2;
  const auto pool = gen_content_pool(spec);
  for (const auto& item : pool) {
    CHECK(item.tags.size() == 3);
    CHECK(row_sum(item.tags) == 1);
  }
  CHECK(gen_content_pool(spec) == pool);
}
