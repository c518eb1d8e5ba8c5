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
#include <limits>
#include <span>
#include <vector>

#include "segcert/errors.hpp"

namespace segcert {

using Label = std::uint16_t;

/// Sentinel for an abstained pixel.
inline constexpr Label kAbstain = std::numeric_limits<Label>::max();

/// Interleaved H x W x C raster of doubles, nominally in [0,1].
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0)
      : height_(height), width_(width), channels_(channels) {
    if (height < 1 || width < 1 || channels < 1) {
      throw DomainError("image dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixels() const noexcept { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// H x W class identifiers; kAbstain marks abstentions.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int height, int width, Label fill = 0) : height_(height), width_(width) {
    if (height < 1 || width < 1) throw DomainError("label map dimensions must be positive");
    data_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  Label& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  Label at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  Label& operator[](std::size_t i) { return data_[i]; }
  Label operator[](std::size_t i) const { return data_[i]; }

  std::span<Label> values() noexcept { return data_; }
  std::span<const Label> values() const noexcept { return data_; }

  bool same_shape(const LabelMap& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool congruent(const Image& image) const noexcept {
    return height_ == image.height() && width_ == image.width();
  }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Label> data_;
};

/// Per-pixel class counts over `draws` Monte Carlo samples, stored pixel-major.
class CountsTensor {
 public:
  CountsTensor() = default;
  CountsTensor(int height, int width, int classes)
      : height_(height), width_(width), classes_(classes) {
    if (height < 1 || width < 1 || classes < 1) throw DomainError("counts dimensions must be positive");
    counts_.assign(static_cast<std::size_t>(height) * width * classes, 0);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int classes() const noexcept { return classes_; }
  std::size_t pixels() const noexcept { return static_cast<std::size_t>(height_) * width_; }
  std::uint64_t draws() const noexcept { return draws_; }

  std::span<const std::uint32_t> pixel(std::size_t i) const {
    return std::span<const std::uint32_t>(counts_).subspan(i * classes_, classes_);
  }

  /// Adds one draw's labels. Every label must be in [0, classes).
  void add(const LabelMap& labels) {
    if (labels.height() != height_ || labels.width() != width_) {
      throw DomainError("label map does not match counts shape");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Label c = labels[i];
      if (c >= classes_) throw DomainError("model emitted a label outside [0, K)");
      ++counts_[i * classes_ + c];
    }
    ++draws_;
  }

  void merge(const CountsTensor& other) {
    if (other.height_ != height_ || other.width_ != width_ || other.classes_ != classes_) {
      throw DomainError("cannot merge counts of different shapes");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    draws_ += other.draws_;
  }

  /// Index of the largest count at pixel i; ties go to the lowest class id.
  Label top(std::size_t i) const {
    const auto row = pixel(i);
    Label best = 0;
    for (int c = 1; c < classes_; ++c) {
      if (row[c] > row[best]) best = static_cast<Label>(c);
    }
    return best;
  }

  friend bool operator==(const CountsTensor&, const CountsTensor&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int classes_ = 0;
  std::uint64_t draws_ = 0;
  std::vector<std::uint32_t> counts_;
};

}  // namespace segcert
