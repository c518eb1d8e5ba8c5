// Copyright 2026 The segcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace segcert::rng {

/// splitmix64 finalizer; bijective 64-bit mixing.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child key from a parent key and an index. Order-sensitive.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t index) noexcept {
  return mix64(mix64(key) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

/// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform double in (0,1].
constexpr double to_unit_open_zero(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Stateless keyed uniform: the same (key, counter) always yields the same value.
constexpr double keyed_uniform(std::uint64_t key, std::uint64_t counter) noexcept {
  return to_unit(derive(key, counter));
}

/// Box-Muller standard normal from two keyed uniforms.
inline double keyed_normal(std::uint64_t key, std::uint64_t counter) noexcept {
  const double u1 = to_unit_open_zero(derive(key, 2 * counter));
  const double u2 = to_unit(derive(key, 2 * counter + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential Gaussian stream on top of mt19937_64. The transform is spelled
/// out here because std::normal_distribution is implementation-defined.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : engine_(key) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = to_unit_open_zero(engine_());
    const double u2 = to_unit(engine_());
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  void fill(std::span<double> out, double stddev) {
    for (double& v : out) v = stddev * next();
  }

  double uniform() { return to_unit(engine_()); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace segcert::rng
