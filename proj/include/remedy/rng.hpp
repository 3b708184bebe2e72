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

#ifndef REMEDY_RNG_HPP_
#define REMEDY_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>

#include <boost/random/mersenne_twister.hpp>

namespace remedy {

// Seedable generator with per-entity substreams. Rng(seed, stream, index)
// is a pure function of its arguments, so entities can be generated in any
// order (or in parallel) with identical results. Distributions come from
// Boost.Random, whose algorithms are fixed across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

  double uniform();  // [0, 1)
  bool bernoulli(double p);
  std::size_t uniform_index(std::size_t n);  // 0..n-1
  double normal(double mean = 0.0, double sd = 1.0);
  double lognormal(double mu, double sigma);
  double beta(double a, double b);
  double uniform_real(double lo, double hi);

  boost::random::mt19937_64& engine() { return engine_; }

 private:
  boost::random::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream,
                       std::uint64_t index);

}  // namespace remedy

#endif  // REMEDY_RNG_HPP_
