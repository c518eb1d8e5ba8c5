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

#include <algorithm>
#include <cmath>
#include <string>

#include "segcert/data.hpp"
#include "segcert/errors.hpp"

namespace segcert::data {
namespace {

int scaled_extent(int n, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("resize scale must be positive and finite");
  const double target = std::round(n * scale);
  if (target < 1.0) {
    throw DomainError("resize of extent " + std::to_string(n) + " by " + std::to_string(scale) +
                      " gives an empty image");
  }
  if (target > 1e6) throw DomainError("resize target is too large");
  return static_cast<int>(target);
}

void check_target(int height, int width) {
  if (height < 1 || width < 1) throw DomainError("resize target must be at least 1x1");
}

int nearest_source(int i, int in, int out) {
  const double src = (i + 0.5) * in / out;
  return std::min(static_cast<int>(std::floor(src)), in - 1);
}

struct Tap {
  int lo;
  int hi;
  double frac;
};

Tap linear_tap(int i, int in, int out) {
  double src = (i + 0.5) * in / out - 0.5;
  src = std::clamp(src, 0.0, static_cast<double>(in - 1));
  const int lo = static_cast<int>(std::floor(src));
  const int hi = std::min(lo + 1, in - 1);
  return {lo, hi, src - lo};
}

}  // namespace

Image resize_to(const Image& image, int height, int width, Resample method) {
  check_target(height, width);
  if (image.empty()) throw DomainError("cannot resize an empty image");
  if (height == image.height() && width == image.width()) return image;
  const int channels = image.channels();
  Image out(height, width, channels);
  if (method == Resample::nearest) {
    for (int y = 0; y < height; ++y) {
      const int sy = nearest_source(y, image.height(), height);
      for (int x = 0; x < width; ++x) {
        const int sx = nearest_source(x, image.width(), width);
        for (int c = 0; c < channels; ++c) out.at(y, x, c) = image.at(sy, sx, c);
      }
    }
    return out;
  }
  std::vector<Tap> cols(static_cast<std::size_t>(width));
  for (int x = 0; x < width; ++x) cols[x] = linear_tap(x, image.width(), width);
  for (int y = 0; y < height; ++y) {
    const Tap ty = linear_tap(y, image.height(), height);
    for (int x = 0; x < width; ++x) {
      const Tap& tx = cols[x];
      for (int c = 0; c < channels; ++c) {
        const double top = image.at(ty.lo, tx.lo, c) * (1.0 - tx.frac) + image.at(ty.lo, tx.hi, c) * tx.frac;
        const double bottom = image.at(ty.hi, tx.lo, c) * (1.0 - tx.frac) + image.at(ty.hi, tx.hi, c) * tx.frac;
        out.at(y, x, c) = top * (1.0 - ty.frac) + bottom * ty.frac;
      }
    }
  }
  return out;
}

Image resize(const Image& image, double scale, Resample method) {
  return resize_to(image, scaled_extent(image.height(), scale), scaled_extent(image.width(), scale), method);
}

LabelMap resize_labels_to(const LabelMap& labels, int height, int width) {
  check_target(height, width);
  if (labels.size() == 0) throw DomainError("cannot resize an empty label map");
  if (height == labels.height() && width == labels.width()) return labels;
  LabelMap out(height, width);
  for (int y = 0; y < height; ++y) {
    const int sy = nearest_source(y, labels.height(), height);
    for (int x = 0; x < width; ++x) out.at(y, x) = labels.at(sy, nearest_source(x, labels.width(), width));
  }
  return out;
}

LabelMap resize_labels(const LabelMap& labels, double scale) {
  return resize_labels_to(labels, scaled_extent(labels.height(), scale), scaled_extent(labels.width(), scale));
}

}  // namespace segcert::data
