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
#include <vector>

#include "segcert/errors.hpp"
#include "segcert/kernels.hpp"

namespace segcert::kernels::detail {

inline void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("kernel operands differ in length");
}

inline void require_same(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw DomainError("kernel operands differ in length");
}

inline void require_means(std::span<const double> means) {
  if (means.empty()) throw DomainError("nearest_mean needs at least one class mean");
}

inline void require_channels(std::size_t interleaved, int channels, std::size_t out) {
  if (channels < 1 || interleaved != out * static_cast<std::size_t>(channels)) {
    throw DomainError("channel_mean: interleaved length is not out.size() * channels");
  }
}

// Components with positive weight, plus the coefficients shared by every pixel.
struct PreparedMixture {
  std::vector<double> means;
  std::vector<double> log_weights;
  double inv_two_var = 0.0;
  double prior_coeff = 0.0;
  double obs_coeff = 0.0;
};

inline PreparedMixture prepare_mixture(const MixtureView& mixture, double sigma_eff) {
  if (mixture.means.size() != mixture.weights.size() || mixture.means.empty()) {
    throw DomainError("posterior_mean: means and weights must be non-empty and equal length");
  }
  if (!(mixture.component_std > 0.0)) throw DomainError("posterior_mean: component std must be > 0");
  if (!(sigma_eff >= 0.0)) throw DomainError("posterior_mean: sigma_eff must be >= 0");
  PreparedMixture p;
  for (std::size_t c = 0; c < mixture.means.size(); ++c) {
    if (mixture.weights[c] < 0.0) throw DomainError("posterior_mean: negative mixture weight");
    if (mixture.weights[c] == 0.0) continue;
    p.means.push_back(mixture.means[c]);
    p.log_weights.push_back(std::log(mixture.weights[c]));
  }
  if (p.means.empty()) throw DomainError("posterior_mean: all mixture weights are zero");
  const double s2 = mixture.component_std * mixture.component_std;
  const double n2 = sigma_eff * sigma_eff;
  p.inv_two_var = 1.0 / (2.0 * (s2 + n2));
  p.prior_coeff = n2 / (s2 + n2);
  p.obs_coeff = s2 / (s2 + n2);
  return p;
}

}  // namespace segcert::kernels::detail
