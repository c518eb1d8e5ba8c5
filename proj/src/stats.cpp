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

#include "segcert/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "segcert/errors.hpp"

namespace segcert::stats {
namespace {

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
  return std::lgamma(x);
#endif
}

double log_choose(long n, long k) {
  return log_gamma(static_cast<double>(n) + 1.0) - log_gamma(static_cast<double>(k) + 1.0) -
         log_gamma(static_cast<double>(n - k) + 1.0);
}

// Sum of binomial pmf terms j in [lo, hi], accumulated around the largest term.
double pmf_sum(long lo, long hi, long n, double p) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> terms(static_cast<std::size_t>(hi - lo + 1));
  double peak = -std::numeric_limits<double>::infinity();
  for (long j = lo; j <= hi; ++j) {
    const double t = log_choose(n, j) + static_cast<double>(j) * log_p +
                     static_cast<double>(n - j) * log_q;
    terms[static_cast<std::size_t>(j - lo)] = t;
    peak = std::max(peak, t);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return std::exp(peak) * sum;
}

// P[Bin(n, p) >= k] for 0 <= k <= n and p in [0,1]. Below the mean the
// complement is the small side, so it is summed instead.
double upper_tail(long k, long n, double p) {
  if (k <= 0) return 1.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  if (static_cast<double>(k) <= static_cast<double>(n) * p) {
    return std::clamp(1.0 - pmf_sum(0, k - 1, n, p), 0.0, 1.0);
  }
  return std::clamp(pmf_sum(k, n, n, p), 0.0, 1.0);
}

// Acklam's rational approximation for the lower half, p in (0, 0.5].
double quantile_lower_half(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // One Halley step against the erfc-based CDF.
  const double e = gaussian_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

void SignificanceConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (!(tau >= 0.5 && tau < 1.0)) throw DomainError("tau must lie in [0.5,1)");
}

std::size_t HolmDecision::rejections() const {
  return static_cast<std::size_t>(std::count(reject.begin(), reject.end(), true));
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("gaussian_quantile: p must lie in (0,1), got " + std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  return p < 0.5 ? quantile_lower_half(p) : -quantile_lower_half(1.0 - p);
}

double certified_radius(double sigma, double p) {
  if (!(sigma >= 0.0)) throw DomainError("certified_radius: sigma must be non-negative");
  return sigma * gaussian_quantile(p);
}

double binomial_tail_pvalue(long successes, long trials, double tau) {
  if (trials < 1) throw DomainError("binomial_tail_pvalue: trials must be >= 1");
  if (successes < 0 || successes > trials) {
    throw DomainError("binomial_tail_pvalue: successes must lie in [0, trials]");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("binomial_tail_pvalue: tau must lie in (0,1)");
  return upper_tail(successes, trials, tau);
}

double clopper_pearson_lower(long successes, long trials, double alpha) {
  if (trials < 1) throw DomainError("clopper_pearson_lower: trials must be >= 1");
  if (successes < 0 || successes > trials) {
    throw DomainError("clopper_pearson_lower: successes must lie in [0, trials]");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("clopper_pearson_lower: alpha must lie in (0,1)");
  if (successes == 0) return 0.0;

  // upper_tail is increasing in p; keep lo on the side where tail <= alpha.
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (upper_tail(successes, trials, mid) <= alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

HolmDecision holm_correct(std::span<const double> pvalues, double alpha) {
  if (pvalues.empty()) throw DomainError("holm_correct: empty p-value sequence");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("holm_correct: alpha must lie in (0,1)");
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("holm_correct: p-values must lie in [0,1]");
  }

  const std::size_t n = pvalues.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

  HolmDecision decision{std::vector<bool>(n, false)};
  for (std::size_t rank = 0; rank < n; ++rank) {
    const double threshold = alpha / static_cast<double>(n - rank);
    if (pvalues[order[rank]] > threshold) break;
    decision.reject[order[rank]] = true;
  }
  return decision;
}

}  // namespace segcert::stats
