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

#include "oracles.hpp"
#include "segcert/data.hpp"
#include "segcert/errors.hpp"
#include "segcert/smoothing.hpp"

using namespace segcert;
using namespace segcert::smoothing;

namespace {

const diffusion::DiffusionSchedule& schedule() {
  static const auto s = diffusion::DiffusionSchedule::linear(1000, 1e-4, 0.02);
  return s;
}

SmoothingConfig table1(double sigma) {
  SmoothingConfig c;
  c.sigma = sigma;
  c.n0 = 10;
  c.n = 100;
  c.significance = {0.001, 0.75};
  return c;
}

}  // namespace

TEST_CASE("constant model certifies every pixel") {
  const models::ConstantModel model(2, 4);
  const Image x(64, 64, 1, 0.5);
  const auto r = seg_certify(model, {}, x, table1(0.25));
  CHECK(r.abstentions() == 0);
  for (Label l : r.labels.values()) CHECK(l == 2);
  for (double pv : r.pvalues) CHECK(pv == doctest::Approx(3.2072021853815e-13).epsilon(1e-9));
  CHECK(r.radius == doctest::Approx(0.16862244).epsilon(1e-8));
  CHECK(r.t_star == 0);
  CHECK(r.denoiser_calls == 0);
}

TEST_CASE("sigma zero gives radius zero") {
  const models::ConstantModel model(0, 2);
  const auto r = seg_certify(model, {}, Image(4, 4, 1), table1(0.0));
  CHECK(r.radius == 0.0);
  CHECK(r.abstentions() == 0);
}

TEST_CASE("certify_from_counts follows the definition") {
  // Hand-built counts: pixel i sees class 1 in `hits[i]` of n draws.
  const int hits[] = {100, 99, 90, 85, 80, 75, 60, 30};
  const int n = 100;
  CertificationResult r;
  r.config = table1(0.5);
  r.config.significance.alpha = 0.05;
  r.counts0 = CountsTensor(1, 8, 3);
  r.counts = CountsTensor(1, 8, 3);
  LabelMap sel(1, 8, 1);
  for (int j = 0; j < 10; ++j) r.counts0.add(sel);
  for (int j = 0; j < n; ++j) {
    LabelMap draw(1, 8, 1);
    for (int i = 0; i < 8; ++i) {
      if (j >= hits[i]) draw[i] = 2;
    }
    r.counts.add(draw);
  }
  certify_from_counts(r);
  std::vector<double> pv;
  for (int i = 0; i < 8; ++i) pv.push_back(stats::binomial_tail_pvalue(hits[i], n, 0.75));
  const auto reject = oracle::holm(pv, 0.05);
  for (int i = 0; i < 8; ++i) {
    CAPTURE(i);
    CHECK(r.pvalues[i] == pv[i]);
    CHECK(r.labels[i] == (reject[i] ? Label{1} : kAbstain));
  }
  CHECK(r.labels[0] == 1);
  CHECK(r.labels[7] == kAbstain);
}

TEST_CASE("counts and certificates do not depend on thread count") {
  const auto scene = data::gen_scene({.height = 24, .width = 20, .classes = 3, .means = {0.2, 0.5, 0.8}, .seed = 1});
  const models::BandSegmenter band(scene.spec.class_means(), 0.05);
  diffusion::MixtureDenoiser denoiser(diffusion::Mixture::uniform(scene.spec.class_means(), 0.05), 2);
  for (DenoiseMode mode : {DenoiseMode::off, DenoiseMode::single_step}) {
    auto cfg = table1(0.5);
    cfg.denoising = mode;
    cfg.n = 40;
    cfg.seed = 77;
    const auto one = seg_certify(band, {&denoiser, &schedule()}, scene.image, cfg);
    cfg.threads = 4;
    const auto four = seg_certify(band, {&denoiser, &schedule()}, scene.image, cfg);
    CHECK(one.counts == four.counts);
    CHECK(one.counts0 == four.counts0);
    CHECK(one.labels == four.labels);
    CHECK(one.pvalues == four.pvalues);
    cfg.seed = 78;
    CHECK(!(seg_certify(band, {&denoiser, &schedule()}, scene.image, cfg).counts == one.counts));
  }
}

TEST_CASE("denoiser call accounting") {
  const models::ConstantModel model(0, 2);
  diffusion::MixtureDenoiser denoiser(diffusion::Mixture::uniform({0.2, 0.8}, 0.05), 0);
  auto cfg = table1(1.0);
  cfg.n0 = 1;
  cfg.n = 2;
  cfg.denoising = DenoiseMode::multi_step;
  const auto multi = seg_certify(model, {&denoiser, &schedule()}, Image(3, 3, 1, 0.5), cfg);
  CHECK(multi.t_star == 258);
  CHECK(multi.denoiser_calls == 3 * 258);
  CHECK(multi.denoiser_calls_per_draw() == 258.0);

  cfg.denoising = DenoiseMode::single_step;
  const auto single = seg_certify(model, {&denoiser, &schedule()}, Image(3, 3, 1, 0.5), cfg);
  CHECK(single.denoiser_calls_per_draw() == 1.0);

  cfg.sigma = 0.0;
  const auto none = seg_certify(model, {&denoiser, &schedule()}, Image(3, 3, 1, 0.5), cfg);
  CHECK(none.denoiser_calls == 0);
  CHECK(cfg.effective_denoising() == DenoiseMode::off);
}

TEST_CASE("denoising without a backend is an error") {
  const models::ConstantModel model(0, 2);
  auto cfg = table1(0.5);
  cfg.denoising = DenoiseMode::single_step;
  CHECK_THROWS_AS(seg_certify(model, {}, Image(2, 2, 1), cfg), DomainError);
}

TEST_CASE("class count mismatch is a configuration error") {
  const models::ConstantModel model(0, 2);
  auto cfg = table1(0.5);
  cfg.classes = 3;
  CHECK_THROWS_AS(seg_certify(model, {}, Image(2, 2, 1), cfg), ConfigError);
}

TEST_CASE("config validation") {
  auto cfg = table1(0.5);
  cfg.n = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = table1(-0.1);
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = table1(0.5);
  cfg.scale = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK(parse_denoise_mode("multi_step") == DenoiseMode::multi_step);
  CHECK(to_string(DenoiseMode::single_step) == "single_step");
  CHECK_THROWS_AS(parse_denoise_mode("sometimes"), DomainError);
}

TEST_CASE("working-resolution scale keeps the original shape") {
  const auto scene = data::gen_scene({.height = 32, .width = 32, .classes = 4, .seed = 3});
  const models::BandSegmenter band(scene.spec.class_means(), 0.05);
  auto cfg = table1(0.1);
  cfg.n = 30;
  cfg.scale = 0.5;
  const auto r = seg_certify(band, {}, scene.image, cfg);
  CHECK(r.labels.same_shape(scene.labels));
}

TEST_CASE("certified labels are right on a confident oracle channel") {
  const auto scene = data::gen_scene({.height = 16, .width = 16, .classes = 4, .seed = 6});
  const models::OracleChannelModel model(models::OracleChannelSpec::uniform(scene.labels, 4, 0.97), 2);
  auto cfg = table1(0.25);
  cfg.significance.alpha = 0.05;
  const auto r = seg_certify(model, {}, scene.image, cfg);
  CHECK(r.abstentions() < r.labels.size() / 2);
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    if (r.labels[i] != kAbstain) CHECK(r.labels[i] == scene.labels[i]);
  }
}

TEST_CASE("cohen certifier") {
  std::vector<std::uint32_t> c0{0, 10, 0};
  std::vector<std::uint32_t> c{0, 100, 0};
  const auto cert = cohen_certify_pixel(c0, c, 10, 100, 0.001, 0.25);
  CHECK(cert.label == 1);
  CHECK(std::fabs(cert.radius - 0.3753) <= 0.0005);
  CHECK(cert.radius == doctest::Approx(0.25 * oracle::normal_quantile(std::pow(0.001, 0.01))).epsilon(1e-8));
  for (std::uint32_t k = 0; k <= 50; ++k) {
    std::vector<std::uint32_t> counts{100 - k, k, 0};
    CHECK(cohen_certify_pixel(c0, counts, 10, 100, 0.001, 0.25).label == kAbstain);
  }
  CHECK_THROWS_AS(cohen_certify_pixel(c0, c, 10, 99, 0.001, 0.25), DomainError);
}
