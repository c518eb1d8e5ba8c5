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

#include "segcert/smoothing.hpp"

#include <algorithm>
#include <string>

#include "segcert/data.hpp"
#include "segcert/errors.hpp"
#include "segcert/kernels.hpp"
#include "segcert/parallel.hpp"
#include "segcert/rng.hpp"

namespace segcert::smoothing {
namespace {

constexpr std::uint64_t kModelStream = 0x6d6f64656cULL;

// Image the base model sees for one draw, before any resizing.
Image perturbed_input(const Image& x, const Image& eta, const DenoisingBackend& backend,
                      DenoiseMode mode, const diffusion::TimestepSolution& step) {
  const auto& k = kernels::active();
  if (mode == DenoiseMode::off) {
    Image out(x.height(), x.width(), x.channels());
    k.add_clamp(x.values(), eta.values(), out.values());
    return out;
  }
  const Image x_t = diffusion::noisy_model_input(x, eta, step.alpha_bar_star);
  if (mode == DenoiseMode::single_step) {
    return diffusion::denoise_single_step(*backend.denoiser, x_t, *backend.schedule, step.t_star);
  }
  return diffusion::denoise_multi_step(*backend.denoiser, x_t, *backend.schedule, step.t_star);
}

LabelMap classify(const models::SegmentationModel& model, const Image& input, double scale,
                  std::uint64_t call_seed) {
  if (scale == 1.0) return model.segment(input, call_seed);
  const Image working = data::resize(input, scale, data::Resample::bilinear);
  const LabelMap labels = model.segment(working, call_seed);
  return data::resize_labels_to(labels, input.height(), input.width());
}

}  // namespace

std::string_view to_string(DenoiseMode mode) {
  switch (mode) {
    case DenoiseMode::off:
      return "off";
    case DenoiseMode::single_step:
      return "single_step";
    case DenoiseMode::multi_step:
      return "multi_step";
  }
  return "off";
}

DenoiseMode parse_denoise_mode(std::string_view text) {
  if (text == "off" || text == "none") return DenoiseMode::off;
  if (text == "single_step" || text == "single") return DenoiseMode::single_step;
  if (text == "multi_step" || text == "multi") return DenoiseMode::multi_step;
  throw DomainError("unknown denoise mode '" + std::string(text) +
                    "' (expected off, single_step or multi_step)");
}

void SmoothingConfig::validate() const {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
  if (n0 < 1 || n < 1) throw DomainError("n0 and n must be at least 1");
  significance.validate();
  if (threads < 1) throw DomainError("threads must be at least 1");
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (classes < 0) throw DomainError("classes must be non-negative");
}

SampleOutcome sample_counts(const models::SegmentationModel& model, const DenoisingBackend& backend,
                            const Image& x, const SampleRequest& request) {
  if (request.draws < 1) throw DomainError("sample_counts: draws must be at least 1");
  if (!(request.sigma >= 0.0)) throw DomainError("sample_counts: sigma must be non-negative");
  const DenoiseMode mode = request.sigma > 0.0 ? request.denoising : DenoiseMode::off;

  diffusion::TimestepSolution step;
  if (mode != DenoiseMode::off) {
    if (backend.denoiser == nullptr || backend.schedule == nullptr) {
      throw DomainError("denoising requested without a denoiser and schedule");
    }
    step = diffusion::compute_timestep(*backend.schedule, request.sigma);
  }

  const int classes = model.num_classes();
  const std::uint64_t phase_key =
      rng::derive(request.seed, static_cast<std::uint64_t>(request.phase));
  const std::uint64_t calls_before = backend.denoiser ? backend.denoiser->calls() : 0;

  const int workers = std::max(1, std::min(request.threads, request.draws));
  std::vector<CountsTensor> partial(static_cast<std::size_t>(workers),
                                    CountsTensor(x.height(), x.width(), classes));
  parallel_chunks(static_cast<std::size_t>(request.draws), workers,
                  [&](int worker, std::size_t begin, std::size_t end) {
                    Image eta(x.height(), x.width(), x.channels());
                    for (std::size_t j = begin; j < end; ++j) {
                      const std::uint64_t key = rng::derive(phase_key, j);
                      LabelMap labels;
                      if (request.sigma > 0.0) {
                        rng::GaussianStream noise(key);
                        noise.fill(eta.values(), request.sigma);
                        const Image input = perturbed_input(x, eta, backend, mode, step);
                        labels = classify(model, input, request.scale, rng::derive(key, kModelStream));
                      } else {
                        labels = classify(model, x, request.scale, rng::derive(key, kModelStream));
                      }
                      partial[static_cast<std::size_t>(worker)].add(labels);
                    }
                  });

  SampleOutcome outcome{CountsTensor(x.height(), x.width(), classes), 0, step.t_star};
  for (const auto& p : partial) outcome.counts.merge(p);
  if (backend.denoiser != nullptr) outcome.denoiser_calls = backend.denoiser->calls() - calls_before;
  return outcome;
}

std::size_t CertificationResult::abstentions() const {
  return static_cast<std::size_t>(std::count(labels.values().begin(), labels.values().end(), kAbstain));
}

double CertificationResult::denoiser_calls_per_draw() const {
  const auto draws = counts0.draws() + counts.draws();
  return draws == 0 ? 0.0 : static_cast<double>(denoiser_calls) / static_cast<double>(draws);
}

void certify_from_counts(CertificationResult& result) {
  const auto& cfg = result.config;
  const std::size_t pixels = result.counts.pixels();
  if (result.counts0.pixels() != pixels || result.counts0.classes() != result.counts.classes()) {
    throw DomainError("selection and estimation counts differ in shape");
  }
  result.labels = LabelMap(result.counts.height(), result.counts.width());
  result.pvalues.assign(pixels, 1.0);
  const auto trials = static_cast<long>(result.counts.draws());
  for (std::size_t i = 0; i < pixels; ++i) {
    const Label top = result.counts0.top(i);
    const auto hits = static_cast<long>(result.counts.pixel(i)[top]);
    result.labels[i] = top;
    result.pvalues[i] = stats::binomial_tail_pvalue(hits, trials, cfg.significance.tau);
  }
  const auto decision = stats::holm_correct(result.pvalues, cfg.significance.alpha);
  for (std::size_t i = 0; i < pixels; ++i) {
    if (!decision.reject[i]) result.labels[i] = kAbstain;
  }
  result.radius = stats::certified_radius(cfg.sigma, cfg.significance.tau);
}

CertificationResult seg_certify(const models::SegmentationModel& model,
                                const DenoisingBackend& backend, const Image& x,
                                const SmoothingConfig& config) {
  config.validate();
  if (config.classes != 0 && config.classes != model.num_classes()) {
    throw ConfigError("model has " + std::to_string(model.num_classes()) +
                      " classes but the configuration expects " + std::to_string(config.classes));
  }
  SampleRequest request{config.n0, config.sigma, config.effective_denoising(), config.seed,
                        Phase::selection, config.threads, config.scale};
  SampleOutcome selection = sample_counts(model, backend, x, request);
  request.draws = config.n;
  request.phase = Phase::estimation;
  SampleOutcome estimation = sample_counts(model, backend, x, request);

  CertificationResult result;
  result.config = config;
  result.counts0 = std::move(selection.counts);
  result.counts = std::move(estimation.counts);
  result.t_star = estimation.t_star;
  result.denoiser_calls = selection.denoiser_calls + estimation.denoiser_calls;
  certify_from_counts(result);
  return result;
}

PixelCertificate cohen_certify_pixel(std::span<const std::uint32_t> counts0,
                                     std::span<const std::uint32_t> counts, long n0, long n,
                                     double alpha, double sigma) {
  if (counts0.empty() || counts0.size() != counts.size()) {
    throw DomainError("cohen_certify_pixel: count vectors must be non-empty and equal length");
  }
  long sum0 = 0;
  long sum = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    sum0 += counts0[c];
    sum += counts[c];
  }
  if (sum0 != n0 || sum != n) throw DomainError("cohen_certify_pixel: counts do not sum to n0 and n");
  if (!(sigma >= 0.0)) throw DomainError("cohen_certify_pixel: sigma must be non-negative");

  std::size_t top = 0;
  for (std::size_t c = 1; c < counts0.size(); ++c) {
    if (counts0[c] > counts0[top]) top = c;
  }
  const double lower = stats::clopper_pearson_lower(counts[top], n, alpha);
  if (lower <= 0.5) return {};
  return {static_cast<Label>(top), sigma * stats::gaussian_quantile(lower)};
}

}  // namespace segcert::smoothing
