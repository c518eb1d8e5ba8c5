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

#include "segcert/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "segcert/errors.hpp"
#include "segcert/models.hpp"
#include "segcert/parallel.hpp"
#include "segcert/rng.hpp"
#include "segcert/smoothing.hpp"

namespace segcert::verification {
namespace {

constexpr std::uint64_t kChannelStream = 0x6368616e6eULL;

long double choose(long n, long k) {
  long double c = 1.0L;
  for (long i = 1; i <= k; ++i) c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return c;
}

long double power(long double base, long e) {
  long double r = 1.0L;
  for (long i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

double pvalue_bruteforce(long k, long n, double tau) {
  if (n > 64) throw RangeError("pvalue_bruteforce supports n <= 64");
  if (n < 0 || k < 0 || k > n) throw DomainError("pvalue_bruteforce: need 0 <= k <= n");
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("pvalue_bruteforce: tau must lie in [0,1]");
  const long double t = tau;
  long double sum = 0.0L;
  for (long i = k; i <= n; ++i) sum += choose(n, i) * power(t, i) * power(1.0L - t, n - i);
  return static_cast<double>(std::min(sum, 1.0L));
}

stats::HolmDecision holm_bruteforce(std::span<const double> pvalues, double alpha) {
  const std::size_t count = pvalues.size();
  if (count > 20) throw RangeError("holm_bruteforce supports at most 20 hypotheses");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  // selection sort; ties keep index order
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < count; ++j) {
      if (pvalues[order[j]] < pvalues[order[best]]) best = j;
    }
    const std::size_t picked = order[best];
    order.erase(order.begin() + static_cast<long>(best));
    order.insert(order.begin() + static_cast<long>(i), picked);
  }
  std::size_t stop = count;
  for (std::size_t rank = 0; rank < count; ++rank) {
    if (pvalues[order[rank]] > alpha / static_cast<double>(count - rank)) {
      stop = rank;
      break;
    }
  }
  stats::HolmDecision d;
  d.reject.assign(count, false);
  for (std::size_t rank = 0; rank < stop; ++rank) d.reject[order[rank]] = true;
  return d;
}

void FwerRunSpec::validate() const {
  if (pixels < 1) throw DomainError("fwer: pixels must be positive");
  if (n < 1 || n0 < 1) throw DomainError("fwer: n and n0 must be positive");
  if (trials < 100) throw DomainError("fwer: at least 100 trials are required");
  if (classes < 3) throw DomainError("fwer: classes must be at least 3");
  if (threads < 1) throw DomainError("fwer: threads must be at least 1");
  stats::SignificanceConfig{alpha, tau}.validate();
  if (!(p_true >= 0.0 && p_true <= tau)) throw DomainError("fwer: p_true must lie in [0, tau]");
}

double FwerReport::tolerance() const {
  return spec.alpha + 3.0 * std::sqrt(spec.alpha * (1.0 - spec.alpha) / spec.trials);
}

FwerReport fwer_simulate(const FwerRunSpec& spec) {
  spec.validate();
  FwerReport report;
  report.spec = spec;
  report.trials.resize(static_cast<std::size_t>(spec.trials));

  const LabelMap truth(1, spec.pixels, 0);
  const Image blank(1, spec.pixels, 1);
  const double wrong_p = (1.0 - spec.p_true) / (spec.classes - 1);

  smoothing::SmoothingConfig config;
  config.sigma = 0.0;  // the channel ignores its input
  config.n0 = spec.n0;
  config.n = spec.n;
  config.significance = {spec.alpha, spec.tau};

  parallel_chunks(static_cast<std::size_t>(spec.trials), spec.threads,
                  [&](int, std::size_t begin, std::size_t end) {
                    for (std::size_t t = begin; t < end; ++t) {
                      TrialOutcome& out = report.trials[t];
                      out.trial = static_cast<int>(t);
                      out.seed = rng::derive(spec.seed, t);
                      const models::OracleChannelModel channel(
                          models::OracleChannelSpec::uniform(truth, spec.classes, spec.p_true),
                          rng::derive(out.seed, kChannelStream));
                      smoothing::SmoothingConfig cfg = config;
                      cfg.seed = out.seed;
                      const auto result = smoothing::seg_certify(channel, {}, blank, cfg);
                      out.min_pvalue = *std::min_element(result.pvalues.begin(), result.pvalues.end());
                      for (std::size_t i = 0; i < result.labels.size(); ++i) {
                        const Label l = result.labels[i];
                        if (l == kAbstain) continue;
                        ++out.certified;
                        const double p = l == truth[i] ? spec.p_true : wrong_p;
                        if (p <= spec.tau) ++out.false_certified;
                      }
                      out.error = out.false_certified > 0;
                    }
                  });

  for (const auto& t : report.trials) report.errors += t.error ? 1 : 0;
  report.fwer = static_cast<double>(report.errors) / spec.trials;
  report.standard_error = std::sqrt(report.fwer * (1.0 - report.fwer) / spec.trials);
  return report;
}

std::string fwer_csv_header() { return "trial,seed,certified,false_certified,min_pvalue,error"; }

std::string fwer_csv_line(const TrialOutcome& t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", t.min_pvalue);
  return std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' + std::to_string(t.certified) + ',' +
         std::to_string(t.false_certified) + ',' + buf + ',' + (t.error ? "1" : "0");
}

}  // namespace segcert::verification
