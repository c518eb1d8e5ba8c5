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

#include <cmath>
#include <limits>
#include <vector>

#include "segcert/kernels.hpp"
#include "kernel_checks.hpp"

namespace segcert::kernels {
namespace {

inline double clamp_unit(double v) {
  const double lo = v > 0.0 ? v : 0.0;
  return lo < 1.0 ? lo : 1.0;
}

void add_clamp(std::span<const double> x, std::span<const double> eta, std::span<double> out) {
  detail::require_same(x.size(), eta.size(), out.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = clamp_unit(x[i] + eta[i]);
}

void noisy_affine(std::span<const double> x, std::span<const double> eta, double gain, double bias,
                  std::span<double> out) {
  detail::require_same(x.size(), eta.size(), out.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = gain * (x[i] + eta[i]) + bias;
}

void affine(std::span<const double> x, double gain, double bias, std::span<double> out) {
  detail::require_same(x.size(), out.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = gain * x[i] + bias;
}

void blend(std::span<const double> a, std::span<const double> b, double wa, double wb,
           std::span<double> out) {
  detail::require_same(a.size(), b.size(), out.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = wa * a[i] + wb * b[i];
}

void clamp01(std::span<double> v) {
  for (double& x : v) x = clamp_unit(x);
}

void nearest_mean(std::span<const double> values, std::span<const double> means,
                  std::span<Label> out) {
  detail::require_same(values.size(), out.size());
  detail::require_means(means);
  for (std::size_t i = 0; i < values.size(); ++i) {
    double best = std::abs(values[i] - means[0]);
    Label label = 0;
    for (std::size_t c = 1; c < means.size(); ++c) {
      const double d = std::abs(values[i] - means[c]);
      if (d < best) {
        best = d;
        label = static_cast<Label>(c);
      }
    }
    out[i] = label;
  }
}

void posterior_mean(std::span<const double> obs, const MixtureView& mixture, double sigma_eff,
                    std::span<double> out) {
  detail::require_same(obs.size(), out.size());
  const auto comps = detail::prepare_mixture(mixture, sigma_eff);
  std::vector<double> logits(comps.means.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double y = obs[i];
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < comps.means.size(); ++c) {
      const double d = y - comps.means[c];
      logits[c] = comps.log_weights[c] - d * d * comps.inv_two_var;
      if (logits[c] > peak) peak = logits[c];
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t c = 0; c < comps.means.size(); ++c) {
      const double r = std::exp(logits[c] - peak);
      const double m = comps.means[c] * comps.prior_coeff + y * comps.obs_coeff;
      num += r * m;
      den += r;
    }
    out[i] = num / den;
  }
}

void channel_mean(std::span<const double> interleaved, int channels, std::span<double> out) {
  detail::require_channels(interleaved.size(), channels, out.size());
  const double inv = 1.0 / static_cast<double>(channels);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sum = interleaved[i * channels];
    for (int c = 1; c < channels; ++c) sum += interleaved[i * channels + c];
    out[i] = sum * inv;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, add_clamp,      noisy_affine,  affine,      blend,
                                 clamp01,     nearest_mean,   posterior_mean, channel_mean};
  return table;
}

}  // namespace segcert::kernels
