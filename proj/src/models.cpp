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

#include "segcert/models.hpp"

#include <algorithm>
#include <set>

#include "segcert/errors.hpp"
#include "segcert/kernels.hpp"
#include "segcert/rng.hpp"

namespace segcert::models {

Image luminance(const Image& image) {
  if (image.channels() == 1) return image;
  Image out(image.height(), image.width(), 1);
  kernels::active().channel_mean(image.values(), image.channels(), out.values());
  return out;
}

BandSegmenter::BandSegmenter(std::vector<double> means, double component_std)
    : means_(std::move(means)), component_std_(component_std) {
  if (means_.size() < 2) throw DomainError("band segmenter needs at least two class means");
  if (std::set<double>(means_.begin(), means_.end()).size() != means_.size()) {
    throw DomainError("band segmenter class means must be distinct");
  }
  if (!(component_std_ > 0.0)) throw DomainError("band segmenter std must be positive");
}

LabelMap BandSegmenter::segment(const Image& image, std::uint64_t) const {
  const Image lum = luminance(image);
  LabelMap out(image.height(), image.width());
  kernels::active().nearest_mean(lum.values(), means_, out.values());
  return out;
}

OracleChannelSpec OracleChannelSpec::uniform(LabelMap ground_truth, int classes, double p_true) {
  OracleChannelSpec spec;
  spec.p_true.assign(ground_truth.size(), p_true);
  spec.ground_truth = std::move(ground_truth);
  spec.classes = classes;
  return spec;
}

void OracleChannelSpec::validate() const {
  if (classes < 2) throw DomainError("oracle channel needs K >= 2");
  if (p_true.size() != ground_truth.size()) {
    throw DomainError("oracle channel p_true map does not match the ground truth");
  }
  for (double p : p_true) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("oracle channel p_true must lie in [0,1]");
  }
  for (Label l : ground_truth.values()) {
    if (l >= classes) throw DomainError("oracle channel ground truth label outside [0, K)");
  }
}

OracleChannelModel::OracleChannelModel(OracleChannelSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
}

LabelMap OracleChannelModel::segment(const Image& image, std::uint64_t call_seed) const {
  if (!spec_.ground_truth.congruent(image)) {
    throw DomainError("oracle channel: image shape differs from ground truth");
  }
  const std::uint64_t key = rng::derive(seed_, call_seed);
  const auto wrong_classes = static_cast<std::uint64_t>(spec_.classes - 1);
  LabelMap out(image.height(), image.width());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Label truth = spec_.ground_truth[i];
    const std::uint64_t pixel_key = rng::derive(key, i);
    if (rng::keyed_uniform(pixel_key, 0) < spec_.p_true[i]) {
      out[i] = truth;
    } else {
      auto wrong = static_cast<Label>(rng::derive(pixel_key, 1) % wrong_classes);
      if (wrong >= truth) ++wrong;
      out[i] = wrong;
    }
  }
  return out;
}

ConstantModel::ConstantModel(Label label, int classes) : label_(label), classes_(classes) {
  if (classes < 1 || label >= classes) throw DomainError("constant model label outside [0, K)");
}

LabelMap ConstantModel::segment(const Image& image, std::uint64_t) const {
  return LabelMap(image.height(), image.width(), label_);
}

}  // namespace segcert::models
