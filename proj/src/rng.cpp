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

#include "remedy/rng.hpp"

#include <cmath>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace remedy {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over the stream name.
std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream,
                       std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ hash_name(stream)) + index);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng::Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index)
    : engine_(mix_seed(seed, stream, index)) {}

double Rng::uniform() { return boost::random::uniform_01<double>()(engine_); }

bool Rng::bernoulli(double p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  return uniform() < p;
}

std::size_t Rng::uniform_index(std::size_t n) {
  return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double Rng::normal(double mean, double sd) {
  return boost::random::normal_distribution<double>(mean, sd)(engine_);
}

double Rng::lognormal(double mu, double sigma) {
  return boost::random::lognormal_distribution<double>(mu, sigma)(engine_);
}

double Rng::beta(double a, double b) {
  return boost::random::beta_distribution<double>(a, b)(engine_);
}

double Rng::uniform_real(double lo, double hi) {
  // Boost's sampler never terminates on an empty interval.
  if (!(lo < hi)) return lo;
  return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
}

}  // namespace remedy
