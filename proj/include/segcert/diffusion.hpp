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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "segcert/image.hpp"
#include "segcert/kernels.hpp"

namespace segcert::diffusion {

struct ScheduleParams {
  int steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
};

/// Per-step noise constants beta[t] and their running product
/// alpha_bar[t] = prod_{s <= t} (1 - beta[s]), for timestep indices t in [0, T).
/// Immutable after construction.
class DiffusionSchedule {
 public:
  /// beta[t] = beta_start + t / (T - 1) * (beta_end - beta_start).
  static DiffusionSchedule linear(int steps, double beta_start, double beta_end);
  static DiffusionSchedule linear(const ScheduleParams& p) {
    return linear(p.steps, p.beta_start, p.beta_end);
  }

  int steps() const noexcept { return static_cast<int>(beta_.size()); }
  double beta(int t) const { return beta_.at(static_cast<std::size_t>(t)); }
  double alpha_bar(int t) const { return alpha_bar_.at(static_cast<std::size_t>(t)); }
  std::span<const double> betas() const noexcept { return beta_; }
  std::span<const double> alpha_bars() const noexcept { return alpha_bar_; }

  /// (1 - alpha_bar[t]) / alpha_bar[t], the squared noise-to-signal ratio at t.
  double noise_ratio(int t) const;

  /// Largest smoothing sigma the schedule can represent.
  double max_sigma() const { return std::sqrt(noise_ratio(steps() - 1)); }

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
};

struct TimestepSolution {
  int t_star = 0;
  double alpha_bar_star = 1.0;
};

/// Timestep whose noise ratio is nearest to sigma^2 (ties to the lower index),
/// searched over [1, T). Throws RangeError, naming max_sigma(), when sigma^2
/// exceeds the last ratio; DomainError when sigma <= 0.
TimestepSolution compute_timestep(const DiffusionSchedule& schedule, double sigma);

/// x -> 2x - 1.
Image to_model_domain(const Image& x);
/// x -> (x + 1) / 2.
Image from_model_domain(const Image& x);

/// sqrt(alpha_bar_star) * (x + eta), elementwise; x is already in the model domain.
Image scale_into_diffusion(const Image& x, const Image& eta, double alpha_bar_star);

/// sqrt(alpha_bar) * (2 (x + eta) - 1): pixel-domain image plus pixel-domain
/// noise, remapped and scaled in one pass.
Image noisy_model_input(const Image& x, const Image& eta, double alpha_bar);

/// Pixel-domain observation x + eta recovered from a model-domain x_t.
Image unscale_observation(const Image& x_t, double alpha_bar);

/// sqrt((1 - alpha_bar) / alpha_bar): the pixel-unit noise std at a timestep.
double noise_level(double alpha_bar);

struct Timestep {
  int index = 0;
  double alpha_bar = 1.0;
};

/// Maps a model-domain noisy image at a timestep to a clean pixel-domain
/// estimate. Implementations must be pure and thread-safe; the base class
/// counts invocations and clamps the result to [0,1].
class Denoiser {
 public:
  Denoiser() = default;
  Denoiser(const Denoiser&) = delete;
  Denoiser& operator=(const Denoiser&) = delete;
  virtual ~Denoiser() = default;

  Image operator()(const Image& x_t, Timestep step) const;

  std::uint64_t calls() const noexcept { return calls_.load(std::memory_order_relaxed); }
  void reset_calls() const noexcept { calls_.store(0, std::memory_order_relaxed); }

 protected:
  virtual Image predict_clean(const Image& x_t, Timestep step) const = 0;

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// Returns the unscaled observation unchanged (no denoising).
class IdentityDenoiser final : public Denoiser {
 protected:
  Image predict_clean(const Image& x_t, Timestep step) const override;
};

/// Gaussian location mixture prior over clean pixel intensities.
struct Mixture {
  std::vector<double> means;
  std::vector<double> weights;
  double component_std = 0.05;

  /// Equal weights over `means`.
  static Mixture uniform(std::vector<double> means, double component_std);

  void validate() const;
  kernels::MixtureView view() const { return {means, weights, component_std}; }
};

/// Per-value posterior mean E[x0 | observed] under `mixture` and N(0, sigma_eff^2) noise.
Image posterior_mean_denoise(const Mixture& mixture, const Image& observed, double sigma_eff);

/// Analytic stand-in for a pretrained diffusion denoiser. Unscales x_t, box
/// filters the observation over a (2r+1)^2 window (edge-replicated), then
/// applies the mixture posterior mean with sigma_eff = noise_level / (2r+1).
/// pool_radius = 0 is the exact per-pixel posterior mean.
class MixtureDenoiser final : public Denoiser {
 public:
  MixtureDenoiser(Mixture mixture, int pool_radius);

  const Mixture& mixture() const noexcept { return mixture_; }
  int pool_radius() const noexcept { return pool_radius_; }

 protected:
  Image predict_clean(const Image& x_t, Timestep step) const override;

 private:
  Mixture mixture_;
  int pool_radius_;
};

/// Edge-replicated box mean over a (2r+1)^2 window, per channel.
Image box_mean(const Image& image, int radius);

/// One denoiser call at t_star.
Image denoise_single_step(const Denoiser& d, const Image& x_t, const DiffusionSchedule& schedule,
                          int t_star);

/// Deterministic reverse process from t_star down to 1: at each t the denoiser
/// predicts x0 and the iterate moves to the posterior mean of x_{t-1}; the step
/// out of t = 1 lands on the clean image. Exactly t_star denoiser calls.
Image denoise_multi_step(const Denoiser& d, const Image& x_t, const DiffusionSchedule& schedule,
                         int t_star);

}  // namespace segcert::diffusion
