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

#include "segcert/diffusion.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "segcert/errors.hpp"

namespace segcert::diffusion {

DiffusionSchedule DiffusionSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw DomainError("schedule needs at least one step");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw DomainError("schedule endpoints must satisfy 0 < beta_start <= beta_end < 1");
  }
  DiffusionSchedule s;
  s.beta_.resize(static_cast<std::size_t>(steps));
  s.alpha_bar_.resize(static_cast<std::size_t>(steps));
  double running = 1.0;
  for (int t = 0; t < steps; ++t) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(steps - 1);
    const double beta = beta_start + frac * (beta_end - beta_start);
    running *= 1.0 - beta;
    s.beta_[static_cast<std::size_t>(t)] = beta;
    s.alpha_bar_[static_cast<std::size_t>(t)] = running;
  }
  return s;
}

double DiffusionSchedule::noise_ratio(int t) const {
  const double ab = alpha_bar(t);
  return (1.0 - ab) / ab;
}

TimestepSolution compute_timestep(const DiffusionSchedule& schedule, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("compute_timestep: sigma must be positive");
  const int last = schedule.steps() - 1;
  if (last < 1) throw DomainError("compute_timestep: schedule needs at least two steps");
  const double target = sigma * sigma;
  if (target > schedule.noise_ratio(last)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "sigma " << sigma << " exceeds the schedule; maximum representable sigma is "
        << schedule.max_sigma();
    throw RangeError(msg.str());
  }
  // Ratios increase with t, so the nearest one straddles the first crossing.
  int t = 1;
  while (t < last && schedule.noise_ratio(t) < target) ++t;
  if (t > 1 && target - schedule.noise_ratio(t - 1) <= schedule.noise_ratio(t) - target) --t;
  return {t, schedule.alpha_bar(t)};
}

Image to_model_domain(const Image& x) {
  Image out(x.height(), x.width(), x.channels());
  kernels::active().affine(x.values(), 2.0, -1.0, out.values());
  return out;
}

Image from_model_domain(const Image& x) {
  Image out(x.height(), x.width(), x.channels());
  kernels::active().affine(x.values(), 0.5, 0.5, out.values());
  return out;
}

Image scale_into_diffusion(const Image& x, const Image& eta, double alpha_bar_star) {
  if (!x.same_shape(eta)) throw DomainError("scale_into_diffusion: noise shape differs from image");
  if (!(alpha_bar_star > 0.0 && alpha_bar_star <= 1.0)) {
    throw DomainError("scale_into_diffusion: alpha_bar must lie in (0,1]");
  }
  Image out(x.height(), x.width(), x.channels());
  kernels::active().noisy_affine(x.values(), eta.values(), std::sqrt(alpha_bar_star), 0.0,
                                 out.values());
  return out;
}

Image noisy_model_input(const Image& x, const Image& eta, double alpha_bar) {
  if (!x.same_shape(eta)) throw DomainError("noisy_model_input: noise shape differs from image");
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) {
    throw DomainError("noisy_model_input: alpha_bar must lie in (0,1]");
  }
  const double root = std::sqrt(alpha_bar);
  Image out(x.height(), x.width(), x.channels());
  kernels::active().noisy_affine(x.values(), eta.values(), 2.0 * root, -root, out.values());
  return out;
}

Image unscale_observation(const Image& x_t, double alpha_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) {
    throw DomainError("unscale_observation: alpha_bar must lie in (0,1]");
  }
  const double gain = 0.5 / std::sqrt(alpha_bar);
  Image out(x_t.height(), x_t.width(), x_t.channels());
  kernels::active().affine(x_t.values(), gain, 0.5, out.values());
  return out;
}

double noise_level(double alpha_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) throw DomainError("noise_level: alpha_bar must lie in (0,1]");
  return std::sqrt((1.0 - alpha_bar) / alpha_bar);
}

Image Denoiser::operator()(const Image& x_t, Timestep step) const {
  calls_.fetch_add(1, std::memory_order_relaxed);
  Image out = predict_clean(x_t, step);
  if (!out.same_shape(x_t)) throw DomainError("denoiser changed the image shape");
  kernels::active().clamp01(out.values());
  return out;
}

Image IdentityDenoiser::predict_clean(const Image& x_t, Timestep step) const {
  return unscale_observation(x_t, step.alpha_bar);
}

Mixture Mixture::uniform(std::vector<double> means, double component_std) {
  Mixture m;
  m.weights.assign(means.size(), means.empty() ? 0.0 : 1.0 / static_cast<double>(means.size()));
  m.means = std::move(means);
  m.component_std = component_std;
  return m;
}

void Mixture::validate() const {
  if (means.empty() || means.size() != weights.size()) {
    throw DomainError("mixture needs matching, non-empty means and weights");
  }
  if (!(component_std > 0.0)) throw DomainError("mixture component std must be positive");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("mixture weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture weights must sum to 1");
}

Image posterior_mean_denoise(const Mixture& mixture, const Image& observed, double sigma_eff) {
  mixture.validate();
  Image out(observed.height(), observed.width(), observed.channels());
  kernels::active().posterior_mean(observed.values(), mixture.view(), sigma_eff, out.values());
  return out;
}

MixtureDenoiser::MixtureDenoiser(Mixture mixture, int pool_radius)
    : mixture_(std::move(mixture)), pool_radius_(pool_radius) {
  mixture_.validate();
  if (pool_radius < 0) throw DomainError("pool radius must be non-negative");
}

Image MixtureDenoiser::predict_clean(const Image& x_t, Timestep step) const {
  Image observed = unscale_observation(x_t, step.alpha_bar);
  double sigma_eff = noise_level(step.alpha_bar);
  if (pool_radius_ > 0) {
    observed = box_mean(observed, pool_radius_);
    sigma_eff /= static_cast<double>(2 * pool_radius_ + 1);
  }
  return posterior_mean_denoise(mixture_, observed, sigma_eff);
}

Image box_mean(const Image& image, int radius) {
  if (radius < 0) throw DomainError("box_mean: radius must be non-negative");
  if (radius == 0) return image;
  const int h = image.height();
  const int w = image.width();
  const int ch = image.channels();
  const double inv = 1.0 / static_cast<double>(2 * radius + 1);
  auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };

  Image rows(h, w, ch);
  for (int y = 0; y < h; ++y) {
    for (int c = 0; c < ch; ++c) {
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int k = -radius; k <= radius; ++k) sum += image.at(y, clampi(x + k, 0, w - 1), c);
        rows.at(y, x, c) = sum * inv;
      }
    }
  }
  Image out(h, w, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double sum = 0.0;
        for (int k = -radius; k <= radius; ++k) sum += rows.at(clampi(y + k, 0, h - 1), x, c);
        out.at(y, x, c) = sum * inv;
      }
    }
  }
  return out;
}

Image denoise_single_step(const Denoiser& d, const Image& x_t, const DiffusionSchedule& schedule,
                          int t_star) {
  if (t_star < 0 || t_star >= schedule.steps()) {
    throw DomainError("denoise_single_step: t_star outside the schedule");
  }
  try {
    return d(x_t, {t_star, schedule.alpha_bar(t_star)});
  } catch (const std::exception& e) {
    throw DomainError("single-step denoising failed at t=" + std::to_string(t_star) + ": " + e.what());
  }
}

Image denoise_multi_step(const Denoiser& d, const Image& x_t, const DiffusionSchedule& schedule,
                         int t_star) {
  if (t_star < 1 || t_star >= schedule.steps()) {
    throw DomainError("denoise_multi_step: t_star outside [1, T)");
  }
  const auto& k = kernels::active();
  Image x = x_t;
  Image x0_model(x.height(), x.width(), x.channels());
  for (int t = t_star; t >= 1; --t) {
    const double ab = schedule.alpha_bar(t);
    Image x0;
    try {
      x0 = d(x, {t, ab});
    } catch (const std::exception& e) {
      throw DomainError("multi-step denoising failed at t=" + std::to_string(t) + ": " + e.what());
    }
    k.affine(x0.values(), 2.0, -1.0, x0_model.values());

    const double ab_prev = t == 1 ? 1.0 : schedule.alpha_bar(t - 1);
    const double alpha = ab / ab_prev;
    const double beta = 1.0 - alpha;
    const double w_x0 = std::sqrt(ab_prev) * beta / (1.0 - ab);
    const double w_xt = std::sqrt(alpha) * (1.0 - ab_prev) / (1.0 - ab);
    k.blend(x0_model.values(), x.values(), w_x0, w_xt, x.values());
  }
  Image out = from_model_domain(x);
  k.clamp01(out.values());
  return out;
}

}  // namespace segcert::diffusion
