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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "segcert/diffusion.hpp"
#include "segcert/image.hpp"
#include "segcert/models.hpp"
#include "segcert/stats.hpp"

namespace segcert::smoothing {

enum class DenoiseMode { off, single_step, multi_step };

std::string_view to_string(DenoiseMode mode);
DenoiseMode parse_denoise_mode(std::string_view text);

struct SmoothingConfig {
  double sigma = 0.25;  // noise std in [0,1] pixel units
  int n0 = 10;          // selection draws
  int n = 100;          // estimation draws
  stats::SignificanceConfig significance;
  DenoiseMode denoising = DenoiseMode::off;
  std::uint64_t seed = 0;
  int threads = 1;     // draw-level workers; results do not depend on it
  double scale = 1.0;  // working resolution of the base model
  int classes = 0;     // expected K; 0 accepts the model's

  void validate() const;
  /// sigma = 0 disables denoising.
  DenoiseMode effective_denoising() const {
    return sigma > 0.0 ? denoising : DenoiseMode::off;
  }
};

/// Denoiser and schedule used when denoising is on. Not owned.
struct DenoisingBackend {
  const diffusion::Denoiser* denoiser = nullptr;
  const diffusion::DiffusionSchedule* schedule = nullptr;
};

/// Sub-stream selector; selection and estimation draws never share noise.
enum class Phase : std::uint64_t { selection = 1, estimation = 2 };

struct SampleRequest {
  int draws = 1;
  double sigma = 0.0;
  DenoiseMode denoising = DenoiseMode::off;
  std::uint64_t seed = 0;
  Phase phase = Phase::estimation;
  int threads = 1;
  double scale = 1.0;
};

struct SampleOutcome {
  CountsTensor counts;
  std::uint64_t denoiser_calls = 0;  // measured on the backend's denoiser
  int t_star = 0;                    // 0 when denoising is off
};

/// Monte Carlo class counts of the (denoised) base model under Gaussian noise.
/// Draw j uses noise from the stream keyed by (seed, phase, j), so the result
/// does not depend on thread count or execution order.
SampleOutcome sample_counts(const models::SegmentationModel& model, const DenoisingBackend& backend,
                            const Image& x, const SampleRequest& request);

struct CertificationResult {
  LabelMap labels;  // kAbstain where Holm did not reject
  double radius = 0.0;
  std::vector<double> pvalues;
  SmoothingConfig config;
  CountsTensor counts0;
  CountsTensor counts;
  int t_star = 0;
  std::uint64_t denoiser_calls = 0;

  std::size_t abstentions() const;
  /// Denoiser calls per Monte Carlo draw (0 when denoising is off).
  double denoiser_calls_per_draw() const;
};

/// Predict-and-certify for segmentation: n0 draws pick each pixel's class, n
/// fresh draws test H0: p <= tau per pixel, Holm controls the family-wise
/// error at alpha, and non-rejected pixels abstain. radius = sigma * Phi^-1(tau).
CertificationResult seg_certify(const models::SegmentationModel& model,
                                const DenoisingBackend& backend, const Image& x,
                                const SmoothingConfig& config);

/// Holm-corrected labelling from fixed counts. Shared by seg_certify and tests.
void certify_from_counts(CertificationResult& result);

struct PixelCertificate {
  Label label = kAbstain;
  double radius = 0.0;
};

/// Single-pixel certificate with a Clopper-Pearson lower bound: abstains
/// unless the bound on the selected class exceeds 1/2.
PixelCertificate cohen_certify_pixel(std::span<const std::uint32_t> counts0,
                                     std::span<const std::uint32_t> counts, long n0, long n,
                                     double alpha, double sigma);

}  // namespace segcert::smoothing
