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

#include <cstddef>
#include <span>
#include <string_view>

#include "segcert/image.hpp"

// Per-pixel arithmetic used inside the Monte Carlo loop. Every kernel has a
// scalar reference implementation; wider variants are selected at runtime and
// must agree with the reference (bit-for-bit, except posterior_mean whose
// vector exp is held to 1e-13).

namespace segcert::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Gaussian location mixture over pixel intensities. Zero-weight components
/// are allowed and contribute nothing.
struct MixtureView {
  std::span<const double> means;
  std::span<const double> weights;
  double component_std = 0.0;
};

struct KernelTable {
  Isa isa;
  /// out = min(max(x + eta, 0), 1)
  void (*add_clamp)(std::span<const double> x, std::span<const double> eta, std::span<double> out);
  /// out = gain * (x + eta) + bias
  void (*noisy_affine)(std::span<const double> x, std::span<const double> eta, double gain,
                       double bias, std::span<double> out);
  /// out = gain * x + bias
  void (*affine)(std::span<const double> x, double gain, double bias, std::span<double> out);
  /// out = wa * a + wb * b
  void (*blend)(std::span<const double> a, std::span<const double> b, double wa, double wb,
                std::span<double> out);
  /// v = min(max(v, 0), 1); NaN maps to 0.
  void (*clamp01)(std::span<double> v);
  /// out[i] = argmin_c |values[i] - means[c]|, ties to the lowest c.
  void (*nearest_mean)(std::span<const double> values, std::span<const double> means,
                       std::span<Label> out);
  /// out[i] = E[x0 | obs[i]] under the mixture prior and N(0, sigma_eff^2) noise.
  void (*posterior_mean)(std::span<const double> obs, const MixtureView& mixture,
                         double sigma_eff, std::span<double> out);
  /// out[i] = mean of interleaved[i*channels .. i*channels + channels).
  void (*channel_mean)(std::span<const double> interleaved, int channels, std::span<double> out);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif

/// True when the running CPU can execute `isa`.
bool isa_supported(Isa isa);

/// Best supported table, unless overridden by force_isa() or the
/// SEGCERT_ISA environment variable ("scalar" or "avx2").
const KernelTable& active();

/// Pins the table returned by active(). Throws DomainError if unsupported.
void force_isa(Isa isa);

/// Clears a force_isa() override.
void reset_isa();

}  // namespace segcert::kernels
