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
#include <memory>
#include <string>
#include <vector>

#include "segcert/image.hpp"

namespace segcert::models {

/// Pixel-wise classifier over K classes. segment() must be pure in
/// (image, call_seed); deterministic models ignore call_seed. Output labels
/// lie in [0, K) and the map matches the image's spatial shape.
class SegmentationModel {
 public:
  virtual ~SegmentationModel() = default;

  virtual int num_classes() const = 0;
  virtual std::string name() const = 0;
  virtual LabelMap segment(const Image& image, std::uint64_t call_seed) const = 0;
};

/// Mean over channels; models consume this single intensity per pixel.
Image luminance(const Image& image);

/// Bayes classifier for equal-variance, equal-weight Gaussian classes:
/// nearest class mean in luminance, ties to the lower class id.
class BandSegmenter final : public SegmentationModel {
 public:
  BandSegmenter(std::vector<double> means, double component_std);

  int num_classes() const override { return static_cast<int>(means_.size()); }
  std::string name() const override { return "band"; }
  LabelMap segment(const Image& image, std::uint64_t call_seed) const override;

  const std::vector<double>& means() const noexcept { return means_; }
  double component_std() const noexcept { return component_std_; }

 private:
  std::vector<double> means_;
  double component_std_;
};

struct OracleChannelSpec {
  std::vector<double> p_true;  // per pixel, row-major
  LabelMap ground_truth;
  int classes = 2;

  /// Constant p_true over the ground truth's shape.
  static OracleChannelSpec uniform(LabelMap ground_truth, int classes, double p_true);

  void validate() const;
};

/// Emits ground_truth[i] with probability p_true[i], otherwise a uniformly
/// chosen wrong class. Randomness is a pure hash of (seed, call_seed, pixel);
/// the image only supplies the shape check.
class OracleChannelModel final : public SegmentationModel {
 public:
  OracleChannelModel(OracleChannelSpec spec, std::uint64_t seed);

  int num_classes() const override { return spec_.classes; }
  std::string name() const override { return "oracle"; }
  LabelMap segment(const Image& image, std::uint64_t call_seed) const override;

  const OracleChannelSpec& spec() const noexcept { return spec_; }

 private:
  OracleChannelSpec spec_;
  std::uint64_t seed_;
};

/// Labels every pixel with one class.
class ConstantModel final : public SegmentationModel {
 public:
  ConstantModel(Label label, int classes);

  int num_classes() const override { return classes_; }
  std::string name() const override { return "constant"; }
  LabelMap segment(const Image& image, std::uint64_t call_seed) const override;

 private:
  Label label_;
  int classes_;
};

}  // namespace segcert::models
