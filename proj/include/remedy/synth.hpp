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

// Seeded generators for simulated cohorts, item banks and content pools.

#ifndef REMEDY_SYNTH_HPP_
#define REMEDY_SYNTH_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "remedy/model.hpp"
#include "remedy/psychometrics.hpp"

namespace remedy {

struct CohortSpec {
  std::size_t n_students = 1000;
  std::size_t n_items = 60;
  std::size_t n_skills = 5;
  double mastery_rate = 0.6;
  double guess_alpha = 7, guess_beta = 18;
  double slip_alpha = 5, slip_beta = 15;
  double single_skill_item_fraction = 0.6;
  // 3PL bank used for ability estimation and adaptive testing.
  double irt_a_min = 1.8, irt_a_max = 3.0;
  double irt_b_sd = 1.0;
  double irt_c_max = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Cohort {
  BinaryMatrix mastery;  // N x K
  std::vector<double> theta;
  QMatrix qmatrix;
  std::vector<ItemParamsDINA> dina;
  std::vector<ItemParams3PL> irt;
  BinaryMatrix responses;  // N x I
};

struct ContentPoolSpec {
  std::size_t n_content = 20;
  std::size_t n_skills = 5;
  double duration_mu = std::log(20.0);
  double duration_sigma = 2.0;
  double duration_min = 5.0;
  double duration_max = 15.0;
  // Mix in level order basic, medium, hard.
  std::array<double, 3> level_mix{0.3, 0.5, 0.2};
  double single_skill_fraction = 0.8;
  bool full_coverage = true;
  std::size_t n_forms = 0;  // representation forms; 0 leaves tags empty
  std::uint64_t seed = 0;

  void validate() const;
};

// Integer counts proportional to `fractions` summing to `total`. Leftover
// units go to the largest remainders; ties favor the earlier entry.
std::vector<std::size_t> largest_remainder(std::span<const double> fractions,
                                           std::size_t total);

QMatrix gen_qmatrix(const CohortSpec& spec);
Cohort gen_cohort(const CohortSpec& spec);
std::vector<ContentItem> gen_content_pool(const ContentPoolSpec& spec);

// One clipped log-normal duration draw, exposed for distribution tests.
double draw_duration(const ContentPoolSpec& spec, std::uint64_t index);

}  // namespace remedy

#endif  // REMEDY_SYNTH_HPP_
