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

#include <span>
#include <vector>

namespace segcert::stats {

/// Overall confidence budget and per-pixel certification threshold.
struct SignificanceConfig {
  double alpha = 0.001;
  double tau = 0.75;

  /// Throws DomainError unless 0 < alpha < 1 and 0.5 <= tau < 1.
  void validate() const;
};

/// reject[i] is true when hypothesis i is rejected (the pixel is certified).
struct HolmDecision {
  std::vector<bool> reject;

  std::size_t rejections() const;
};

/// Standard normal CDF.
double gaussian_cdf(double x);

/// Standard normal quantile, |error| <= 1e-9. Throws DomainError unless 0 < p < 1.
double gaussian_quantile(double p);

/// sigma * gaussian_quantile(p). Negative for p < 0.5; callers treat a
/// non-positive radius as "no certificate".
double certified_radius(double sigma, double p);

/// One-sided p-value of H0: p <= tau given `successes` out of `trials`,
/// i.e. P[Bin(trials, tau) >= successes]. Summed in log space.
double binomial_tail_pvalue(long successes, long trials, double tau);

/// Exact one-sided lower confidence bound: the largest p with
/// P[Bin(trials, p) >= successes] <= alpha (0 when successes == 0).
double clopper_pearson_lower(long successes, long trials, double alpha);

/// Holm-Bonferroni step-down at family-wise level alpha. Ties in p-value are
/// ordered by original index.
HolmDecision holm_correct(std::span<const double> pvalues, double alpha);

}  // namespace segcert::stats
