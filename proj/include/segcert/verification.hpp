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
#include <string>
#include <vector>

#include "segcert/stats.hpp"

namespace segcert::verification {

/// P[Bin(n, tau) >= k] by direct pmf summation in long double. Independent of
/// stats::binomial_tail_pvalue. Throws RangeError for n > 64.
double pvalue_bruteforce(long k, long n, double tau);

/// Holm by definition: find the first sorted p-value above alpha / (N - rank)
/// and reject everything strictly before it. N <= 20.
stats::HolmDecision holm_bruteforce(std::span<const double> pvalues, double alpha);

/// Soundness run on the oracle channel: every pixel emits its true class with
/// probability p_true <= tau, so every certified pixel is a false certificate.
struct FwerRunSpec {
  int pixels = 256;
  int n = 100;
  int n0 = 10;
  double tau = 0.75;
  double alpha = 0.05;
  double p_true = 0.75;
  int trials = 1000;
  std::uint64_t seed = 0;
  int classes = 4;  // >= 3 so no wrong class can exceed tau
  int threads = 1;

  void validate() const;
};

struct TrialOutcome {
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t certified = 0;
  std::size_t false_certified = 0;  // certified pixels whose class probability is <= tau
  double min_pvalue = 1.0;
  bool error = false;
};

struct FwerReport {
  FwerRunSpec spec;
  std::vector<TrialOutcome> trials;
  std::size_t errors = 0;
  double fwer = 0.0;
  double standard_error = 0.0;  // sqrt(fwer (1 - fwer) / trials)

  /// alpha + 3 sqrt(alpha (1 - alpha) / trials).
  double tolerance() const;
};

/// Trial t certifies a fresh 1 x N oracle channel with seed derive(spec.seed, t);
/// outcomes do not depend on thread count.
FwerReport fwer_simulate(const FwerRunSpec& spec);

std::string fwer_csv_header();
std::string fwer_csv_line(const TrialOutcome& trial);

}  // namespace segcert::verification
