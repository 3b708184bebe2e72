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

#include "remedy/synth.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "remedy/rng.hpp"

namespace remedy {
namespace {

bool is_fraction(double v) { return v >= 0 && v <= 1; }

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  // Fisher-Yates.
  for (std::size_t i = n; i > 1; --i) {
    std::swap(p[i - 1], p[rng.uniform_index(i)]);
  }
  return p;
}

// k distinct skills drawn uniformly from 0..skills-1.
std::vector<std::size_t> distinct_skills(std::size_t k, std::size_t skills,
                                         Rng& rng) {
  auto p = permutation(skills, rng);
  p.resize(k);
  return p;
}

}  // namespace

void CohortSpec::validate() const {
  if (n_students == 0 || n_items == 0 || n_skills == 0) {
    throw Error("invalid_spec", "cohort counts must be positive");
  }
  if (!is_fraction(mastery_rate) || !is_fraction(single_skill_item_fraction)) {
    throw Error("invalid_spec", "cohort fractions must lie in [0, 1]");
  }
  if (guess_alpha <= 0 || guess_beta <= 0 || slip_alpha <= 0 || slip_beta <= 0) {
    throw Error("invalid_spec", "Beta prior parameters must be positive");
  }
  if (!(irt_a_min > 0) || irt_a_max < irt_a_min || irt_b_sd < 0 ||
      !(irt_c_max >= 0 && irt_c_max < 1)) {
    throw Error("invalid_spec", "invalid 3PL bank parameters");
  }
  if (n_skills > 20) {
    throw Error("invalid_spec", "n_skills must be <= 20 for DINA calibration");
  }
}

void ContentPoolSpec::validate() const {
  if (n_content == 0 || n_skills == 0) {
    throw Error("invalid_spec", "content pool counts must be positive");
  }
  double mix = 0;
  for (double f : level_mix) {
    if (!is_fraction(f)) {
      throw Error("invalid_spec", "difficulty mix entries must lie in [0, 1]");
    }
    mix += f;
  }
  if (std::abs(mix - 1.0) > 1e-9) {
    throw Error("invalid_spec", fmt::format("difficulty mix sums to {}", mix));
  }
  if (!is_fraction(single_skill_fraction)) {
    throw Error("invalid_spec", "single_skill_fraction must lie in [0, 1]");
  }
  if (single_skill_fraction < 1 && n_skills < 2) {
    throw Error("invalid_spec", "two-skill content needs n_skills >= 2");
  }
  if (!(duration_min > 0) || duration_max < duration_min || duration_sigma < 0) {
    throw Error("invalid_spec", "invalid duration law");
  }
}

std::vector<std::size_t> largest_remainder(std::span<const double> fractions,
                                           std::size_t total) {
  std::vector<std::size_t> counts(fractions.size());
  std::vector<double> rem(fractions.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * static_cast<double>(total);
    // Nudge before flooring so that e.g. 0.6 * 10 lands on 6, not 5.
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(fractions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t t = 0; assigned < total && t < order.size(); ++t, ++assigned) {
    ++counts[order[t]];
  }
  return counts;
}

QMatrix gen_qmatrix(const CohortSpec& spec) {
  spec.validate();
  const std::size_t skills = spec.n_skills;
  const std::array<double, 2> split{spec.single_skill_item_fraction,
                                    1.0 - spec.single_skill_item_fraction};
  const auto counts = largest_remainder(split, spec.n_items);
  const std::size_t n_multi = counts[1];
  if (n_multi > 0 && skills < 3) {
    throw Error("invalid_spec", "multi-skill items need n_skills >= 3");
  }
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    Rng rng(spec.seed, "qmatrix", attempt);
    BinaryMatrix q(spec.n_items, skills);
    const auto rows = permutation(spec.n_items, rng);
    std::vector<std::size_t> cycle;
    for (std::size_t t = 0; t < counts[0]; ++t) {
      if (t % skills == 0) cycle = permutation(skills, rng);
      q(rows[t], cycle[t % skills]) = 1;
    }
    for (std::size_t t = counts[0]; t < spec.n_items; ++t) {
      const std::size_t width = 2 + rng.uniform_index(2);
      for (std::size_t k : distinct_skills(width, skills, rng)) q(rows[t], k) = 1;
    }
    bool complete = true;
    for (std::size_t k = 0; k < skills && complete; ++k) {
      bool seen = false;
      for (std::size_t j = 0; j < spec.n_items && !seen; ++j) seen = q(j, k);
      complete = seen;
    }
    if (complete) return QMatrix(std::move(q));
  }
  throw Error("coverage_unsatisfiable",
              "could not generate a Q-matrix touching every skill");
}

Cohort gen_cohort(const CohortSpec& spec) {
  spec.validate();
  QMatrix q = gen_qmatrix(spec);
  BinaryMatrix mastery(spec.n_students, spec.n_skills);
  std::vector<double> theta(spec.n_students);
  for (std::size_t i = 0; i < spec.n_students; ++i) {
    Rng rng(spec.seed, "mastery", i);
    for (std::size_t k = 0; k < spec.n_skills; ++k) {
      mastery(i, k) = rng.bernoulli(spec.mastery_rate) ? 1 : 0;
    }
    theta[i] = Rng(spec.seed, "theta", i).normal();
  }
  std::vector<ItemParamsDINA> dina(spec.n_items);
  std::vector<ItemParams3PL> irt(spec.n_items);
  for (std::size_t j = 0; j < spec.n_items; ++j) {
    Rng rng(spec.seed, "item", j);
    dina[j].guess = rng.beta(spec.guess_alpha, spec.guess_beta);
    dina[j].slip = rng.beta(spec.slip_alpha, spec.slip_beta);
    Rng irng(spec.seed, "irt", j);
    irt[j].discrimination = irng.uniform_real(spec.irt_a_min, spec.irt_a_max);
    irt[j].difficulty = irng.normal(0.0, spec.irt_b_sd);
    irt[j].guessing = irng.uniform_real(0.0, spec.irt_c_max);
  }
  BinaryMatrix responses = simulate_responses(mastery, q, dina, spec.seed);
  return Cohort{std::move(mastery), std::move(theta), std::move(q),
                std::move(dina), std::move(irt), std::move(responses)};
}

double draw_duration(const ContentPoolSpec& spec, std::uint64_t index) {
  Rng rng(spec.seed, "duration", index);
  const double raw = rng.lognormal(spec.duration_mu, spec.duration_sigma);
  return std::clamp(raw, spec.duration_min, spec.duration_max);
}

std::vector<ContentItem> gen_content_pool(const ContentPoolSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_content;
  const std::size_t skills = spec.n_skills;
  Rng rng(spec.seed, "content_layout", 0);

  // Levels: exact counts, randomly placed over the pool.
  const auto level_counts = largest_remainder(spec.level_mix, n);
  std::vector<Level> levels;
  std::vector<std::size_t> widths;
  const std::array<double, 2> split{spec.single_skill_fraction,
                                    1.0 - spec.single_skill_fraction};
  for (int lvl = 0; lvl < 3; ++lvl) {
    const auto per = largest_remainder(split, level_counts[lvl]);
    for (std::size_t t = 0; t < level_counts[lvl]; ++t) {
      levels.push_back(level_from_index(lvl));
      widths.push_back(t < per[0] ? 1 : 2);
    }
  }
  const auto place = permutation(n, rng);
  std::vector<Level> item_level(n);
  std::vector<std::size_t> item_width(n);
  for (std::size_t t = 0; t < n; ++t) {
    item_level[place[t]] = levels[t];
    item_width[place[t]] = widths[t];
  }

  // Coverage: the first min(n, K) items of a random order each take a
  // distinct skill so the pool union is complete; remaining slots are
  // uniform over skills not already on the item. Medium items lead the
  // order, so when there are enough of them every skill sits within one
  // level of every learner.
  std::vector<BinaryVector> coverage(n, BinaryVector(skills, 0));
  auto order = permutation(n, rng);
  std::stable_partition(order.begin(), order.end(),
                        [&](std::size_t j) { return item_level[j] == Level::kMedium; });
  const auto skill_perm = permutation(skills, rng);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t j = order[t];
    std::size_t filled = 0;
    if (spec.full_coverage && t < skills) {
      coverage[j][skill_perm[t]] = 1;
      filled = 1;
    }
    while (filled < item_width[j]) {
      const std::size_t k = rng.uniform_index(skills);
      if (!coverage[j][k]) {
        coverage[j][k] = 1;
        ++filled;
      }
    }
  }
  if (spec.full_coverage) {
    std::vector<std::size_t> missing;
    for (std::size_t k = 0; k < skills; ++k) {
      bool seen = false;
      for (std::size_t j = 0; j < n && !seen; ++j) seen = coverage[j][k];
      if (!seen) missing.push_back(k + 1);
    }
    if (!missing.empty()) {
      throw Error("coverage_unsatisfiable",
                  fmt::format("pool of {} items cannot cover skills {}", n,
                              fmt::join(missing, ",")));
    }
  }

  std::vector<ContentItem> pool;
  pool.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    BinaryVector tags;
    if (spec.n_forms > 0) {
      tags.assign(spec.n_forms, 0);
      tags[Rng(spec.seed, "form", j).uniform_index(spec.n_forms)] = 1;
    }
    pool.push_back(ContentItem::make(fmt::format("v{:02}", j + 1),
                                     std::move(coverage[j]),
                                     draw_duration(spec, j), item_level[j],
                                     std::move(tags)));
  }
  return pool;
}

}  // namespace remedy
