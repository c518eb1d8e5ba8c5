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

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "segcert/errors.hpp"
#include "segcert/verification.hpp"

using namespace segcert;
using namespace segcert::verification;

TEST_CASE("brute-force p-value examples") {
  CHECK(pvalue_bruteforce(0, 12, 0.75) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pvalue_bruteforce(12, 12, 0.75) == doctest::Approx(0.0316763520241).epsilon(1e-12));
  CHECK_THROWS_AS(pvalue_bruteforce(3, 65, 0.5), RangeError);
  CHECK_THROWS_AS(pvalue_bruteforce(4, 3, 0.5), DomainError);
}

TEST_CASE("brute-force p-value agrees with the library and the test oracle") {
  for (double tau : {0.5, 0.75, 0.9}) {
    for (int n = 1; n <= 12; ++n) {
      for (int k = 0; k <= n; ++k) {
        const double bf = pvalue_bruteforce(k, n, tau);
        CHECK(std::fabs(bf - stats::binomial_tail_pvalue(k, n, tau)) <= 1e-12);
        CHECK(std::fabs(bf - oracle::binomial_upper_tail(k, n, tau)) <= 1e-15);
      }
    }
  }
  CHECK(pvalue_bruteforce(64, 64, 0.75) == doctest::Approx(std::pow(0.75, 64)).epsilon(1e-12));
}

TEST_CASE("brute-force holm examples") {
  CHECK(holm_bruteforce(std::vector<double>(6, 0.0), 0.05).rejections() == 6);
  const double alpha = 0.05;
  std::vector<double> pv;
  for (int i = 0; i < 5; ++i) pv.push_back(alpha / (5 - i) + 1e-6);
  CHECK(holm_bruteforce(pv, alpha).rejections() == 0);
  CHECK_THROWS_AS(holm_bruteforce(std::vector<double>(21, 0.0), alpha), RangeError);
}

TEST_CASE("brute-force holm agrees with holm_correct") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 0.06);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + gen() % 20;
    std::vector<double> pv(n);
    for (auto& p : pv) p = u(gen) * u(gen) * 10;
    REQUIRE(holm_bruteforce(pv, 0.05).reject == stats::holm_correct(pv, 0.05).reject);
  }
}

TEST_CASE("fwer with p_true = 0 never errs") {
  FwerRunSpec spec{.pixels = 32, .n = 50, .p_true = 0.0, .trials = 100, .seed = 1};
  const auto r = fwer_simulate(spec);
  CHECK(r.errors == 0);
  CHECK(r.fwer == 0.0);
  CHECK(r.trials.size() == 100);
}

TEST_CASE("fwer is monotone in alpha under coupled seeds") {
  FwerRunSpec loose{.pixels = 64, .n = 100, .alpha = 0.5, .p_true = 0.75, .trials = 200, .seed = 3};
  FwerRunSpec tight = loose;
  tight.alpha = 0.001;
  const auto a = fwer_simulate(loose);
  const auto b = fwer_simulate(tight);
  for (std::size_t t = 0; t < a.trials.size(); ++t) {
    CHECK(a.trials[t].min_pvalue == b.trials[t].min_pvalue);
    CHECK(a.trials[t].certified >= b.trials[t].certified);
  }
  CHECK(a.fwer > b.fwer);
  CHECK(a.fwer <= a.tolerance());
}

TEST_CASE("fwer boundary run stays within tolerance") {
  FwerRunSpec spec{.pixels = 128, .n = 100, .alpha = 0.05, .p_true = 0.75, .trials = 300, .seed = 9, .threads = 3};
  const auto r = fwer_simulate(spec);
  CHECK(r.fwer <= r.tolerance());
  CHECK(r.standard_error == doctest::Approx(std::sqrt(r.fwer * (1 - r.fwer) / 300)));
  spec.threads = 1;
  const auto serial = fwer_simulate(spec);
  CHECK(serial.errors == r.errors);
  for (std::size_t t = 0; t < r.trials.size(); ++t) CHECK(serial.trials[t].certified == r.trials[t].certified);
}

TEST_CASE("fwer spec validation") {
  CHECK_THROWS_AS(fwer_simulate({.trials = 99}), DomainError);
  CHECK_THROWS_AS(fwer_simulate({.classes = 2}), DomainError);
  CHECK_THROWS_AS(fwer_simulate({.p_true = 0.8}), DomainError);
  CHECK(FwerReport{.spec = {.alpha = 0.05, .trials = 1000}}.tolerance() == doctest::Approx(0.0706757).epsilon(1e-6));
}

TEST_CASE("fwer csv lines") {
  CHECK(fwer_csv_header() == "trial,seed,certified,false_certified,min_pvalue,error");
  TrialOutcome t{.trial = 4, .seed = 10, .certified = 1, .false_certified = 1, .min_pvalue = 0.5, .error = true};
  CHECK(fwer_csv_line(t) == "4,10,1,1,5.000000e-01,1");
}
