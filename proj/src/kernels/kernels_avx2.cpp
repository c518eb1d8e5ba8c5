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

// Compiled with -mavx2 (and without FMA contraction); only reached after a
// runtime cpuid check in dispatch.cpp.

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "segcert/kernels.hpp"
#include "kernel_checks.hpp"

namespace segcert::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline std::size_t body(std::size_t n) { return n - n % kLanes; }

inline __m256d clamp_unit(__m256d v) {
  // max_pd returns the second operand for NaN and signed zeros, matching the
  // scalar `v > 0 ? v : 0`.
  const __m256d lo = _mm256_max_pd(v, _mm256_setzero_pd());
  return _mm256_min_pd(lo, _mm256_set1_pd(1.0));
}

// Cephes-style exp: x = n ln2 + r, exp(r) by a (2,3) Pade form.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo_clip = _mm256_set1_pd(-708.0);
  const __m256d hi_clip = _mm256_set1_pd(709.0);
  x = _mm256_min_pd(_mm256_max_pd(x, lo_clip), hi_clip);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(6.93145751953125E-1)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, _mm256_set1_pd(1.42860682030941723212E-6)));

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  // 2^n through the exponent field; n + 1.5*2^52 leaves n in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                      _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

void add_clamp(std::span<const double> x, std::span<const double> eta, std::span<double> out) {
  detail::require_same(x.size(), eta.size(), out.size());
  const std::size_t m = body(x.size());
  for (std::size_t i = 0; i < m; i += kLanes) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&eta[i]));
    _mm256_storeu_pd(&out[i], clamp_unit(v));
  }
  scalar_table().add_clamp(x.subspan(m), eta.subspan(m), out.subspan(m));
}

void noisy_affine(std::span<const double> x, std::span<const double> eta, double gain, double bias,
                  std::span<double> out) {
  detail::require_same(x.size(), eta.size(), out.size());
  const __m256d g = _mm256_set1_pd(gain);
  const __m256d b = _mm256_set1_pd(bias);
  const std::size_t m = body(x.size());
  for (std::size_t i = 0; i < m; i += kLanes) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&eta[i]));
    _mm256_storeu_pd(&out[i], _mm256_add_pd(_mm256_mul_pd(g, v), b));
  }
  scalar_table().noisy_affine(x.subspan(m), eta.subspan(m), gain, bias, out.subspan(m));
}

void affine(std::span<const double> x, double gain, double bias, std::span<double> out) {
  detail::require_same(x.size(), out.size());
  const __m256d g = _mm256_set1_pd(gain);
  const __m256d b = _mm256_set1_pd(bias);
  const std::size_t m = body(x.size());
  for (std::size_t i = 0; i < m; i += kLanes) {
    _mm256_storeu_pd(&out[i], _mm256_add_pd(_mm256_mul_pd(g, _mm256_loadu_pd(&x[i])), b));
  }
  scalar_table().affine(x.subspan(m), gain, bias, out.subspan(m));
}

void blend(std::span<const double> a, std::span<const double> b, double wa, double wb,
           std::span<double> out) {
  detail::require_same(a.size(), b.size(), out.size());
  const __m256d va = _mm256_set1_pd(wa);
  const __m256d vb = _mm256_set1_pd(wb);
  const std::size_t m = body(a.size());
  for (std::size_t i = 0; i < m; i += kLanes) {
    const __m256d lhs = _mm256_mul_pd(va, _mm256_loadu_pd(&a[i]));
    const __m256d rhs = _mm256_mul_pd(vb, _mm256_loadu_pd(&b[i]));
    _mm256_storeu_pd(&out[i], _mm256_add_pd(lhs, rhs));
  }
  scalar_table().blend(a.subspan(m), b.subspan(m), wa, wb, out.subspan(m));
}

void clamp01(std::span<double> v) {
  const std::size_t m = body(v.size());
  for (std::size_t i = 0; i < m; i += kLanes) {
    _mm256_storeu_pd(&v[i], clamp_unit(_mm256_loadu_pd(&v[i])));
  }
  scalar_table().clamp01(v.subspan(m));
}

void nearest_mean(std::span<const double> values, std::span<const double> means,
                  std::span<Label> out) {
  detail::require_same(values.size(), out.size());
  detail::require_means(means);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const std::size_t m = body(values.size());
  alignas(32) double labels[kLanes];
  for (std::size_t i = 0; i < m; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(&values[i]);
    __m256d best = _mm256_andnot_pd(sign, _mm256_sub_pd(v, _mm256_set1_pd(means[0])));
    __m256d label = _mm256_setzero_pd();
    for (std::size_t c = 1; c < means.size(); ++c) {
      const __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(v, _mm256_set1_pd(means[c])));
      const __m256d closer = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
      best = _mm256_blendv_pd(best, d, closer);
      label = _mm256_blendv_pd(label, _mm256_set1_pd(static_cast<double>(c)), closer);
    }
    _mm256_store_pd(labels, label);
    for (std::size_t l = 0; l < kLanes; ++l) out[i + l] = static_cast<Label>(labels[l]);
  }
  scalar_table().nearest_mean(values.subspan(m), means, out.subspan(m));
}

void posterior_mean(std::span<const double> obs, const MixtureView& mixture, double sigma_eff,
                    std::span<double> out) {
  detail::require_same(obs.size(), out.size());
  const auto comps = detail::prepare_mixture(mixture, sigma_eff);
  const std::size_t k = comps.means.size();
  const __m256d inv_two_var = _mm256_set1_pd(comps.inv_two_var);
  const __m256d prior_coeff = _mm256_set1_pd(comps.prior_coeff);
  const __m256d obs_coeff = _mm256_set1_pd(comps.obs_coeff);
  struct alignas(32) Lane {
    __m256d v;
  };
  std::vector<Lane> logits(k);
  const std::size_t m = body(obs.size());
  for (std::size_t i = 0; i < m; i += kLanes) {
    const __m256d y = _mm256_loadu_pd(&obs[i]);
    __m256d peak = _mm256_set1_pd(-HUGE_VAL);
    for (std::size_t c = 0; c < k; ++c) {
      const __m256d d = _mm256_sub_pd(y, _mm256_set1_pd(comps.means[c]));
      logits[c].v = _mm256_sub_pd(_mm256_set1_pd(comps.log_weights[c]),
                                _mm256_mul_pd(_mm256_mul_pd(d, d), inv_two_var));
      peak = _mm256_max_pd(peak, logits[c].v);
    }
    __m256d num = _mm256_setzero_pd();
    __m256d den = _mm256_setzero_pd();
    const __m256d shrunk_obs = _mm256_mul_pd(y, obs_coeff);
    for (std::size_t c = 0; c < k; ++c) {
      const __m256d r = exp_pd(_mm256_sub_pd(logits[c].v, peak));
      const __m256d mc =
          _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(comps.means[c]), prior_coeff), shrunk_obs);
      num = _mm256_add_pd(num, _mm256_mul_pd(r, mc));
      den = _mm256_add_pd(den, r);
    }
    _mm256_storeu_pd(&out[i], _mm256_div_pd(num, den));
  }
  scalar_table().posterior_mean(obs.subspan(m), mixture, sigma_eff, out.subspan(m));
}

void channel_mean(std::span<const double> interleaved, int channels, std::span<double> out) {
  detail::require_channels(interleaved.size(), channels, out.size());
  if (channels == 1) {
    std::copy(interleaved.begin(), interleaved.end(), out.begin());
    return;
  }
  const __m256d inv = _mm256_set1_pd(1.0 / static_cast<double>(channels));
  const __m256i stride = _mm256_set_epi64x(3LL * channels, 2LL * channels, channels, 0);
  const std::size_t m = body(out.size());
  for (std::size_t i = 0; i < m; i += kLanes) {
    const double* base = &interleaved[i * channels];
    __m256d sum = _mm256_i64gather_pd(base, stride, 8);
    for (int c = 1; c < channels; ++c) {
      sum = _mm256_add_pd(sum, _mm256_i64gather_pd(base + c, stride, 8));
    }
    _mm256_storeu_pd(&out[i], _mm256_mul_pd(sum, inv));
  }
  scalar_table().channel_mean(interleaved.subspan(m * channels), channels, out.subspan(m));
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2, add_clamp,    noisy_affine,   affine,      blend,
                                 clamp01,    nearest_mean, posterior_mean, channel_mean};
  return table;
}

}  // namespace segcert::kernels
