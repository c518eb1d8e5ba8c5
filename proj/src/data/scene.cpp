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
#include <set>
#include <string>

#include "segcert/data.hpp"
#include "segcert/errors.hpp"
#include "segcert/rng.hpp"

namespace segcert::data {
namespace {

constexpr std::uint64_t kLayoutStream = 0x6c61796f7574ULL;
constexpr std::uint64_t kPixelStream = 0x706978656cULL;

void paint_disks(LabelMap& labels, const SceneSpec& spec) {
  const std::uint64_t key = rng::derive(spec.seed, kLayoutStream);
  const int shortest = std::min(spec.height, spec.width);
  for (int c = 1; c < spec.classes; ++c) {
    const auto base = static_cast<std::uint64_t>(c) * 3;
    const double cy = rng::keyed_uniform(key, base) * spec.height;
    const double cx = rng::keyed_uniform(key, base + 1) * spec.width;
    const double radius =
        std::max(1.5, shortest * (0.12 + 0.13 * rng::keyed_uniform(key, base + 2)));
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const double dy = y + 0.5 - cy;
        const double dx = x + 0.5 - cx;
        if (dy * dy + dx * dx <= radius * radius) labels.at(y, x) = static_cast<Label>(c);
      }
    }
  }
}

}  // namespace

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::stripes:
      return "stripes";
    case Layout::disks:
      return "disks";
    case Layout::checkerboard:
      return "checkerboard";
  }
  return "stripes";
}

Layout parse_layout(std::string_view text) {
  if (text == "stripes") return Layout::stripes;
  if (text == "disks") return Layout::disks;
  if (text == "checkerboard") return Layout::checkerboard;
  throw DomainError("unknown layout '" + std::string(text) + "' (expected stripes, disks or checkerboard)");
}

std::vector<double> SceneSpec::spaced_means(int classes, double gap) {
  std::vector<double> means(static_cast<std::size_t>(std::max(classes, 0)));
  for (int c = 0; c < classes; ++c) {
    means[static_cast<std::size_t>(c)] = 0.5 + (c - 0.5 * (classes - 1)) * gap;
  }
  return means;
}

std::vector<double> SceneSpec::class_means() const {
  return means.empty() ? spaced_means(classes, gap) : means;
}

double SceneSpec::min_gap() const {
  auto sorted = class_means();
  std::sort(sorted.begin(), sorted.end());
  double gap_min = HUGE_VAL;
  for (std::size_t i = 1; i < sorted.size(); ++i) gap_min = std::min(gap_min, sorted[i] - sorted[i - 1]);
  return gap_min;
}

void SceneSpec::validate() const {
  if (height < 1 || width < 1) throw DomainError("scene dimensions must be positive");
  if (classes < 2 || classes > 255) throw DomainError("scene classes must lie in [2, 255]");
  if (channels != 1 && channels != 3) throw DomainError("scene channels must be 1 or 3");
  if (!(component_std > 0.0)) throw DomainError("scene std must be positive");
  if (cell < 1) throw DomainError("checkerboard cell must be positive");
  if (!means.empty() && static_cast<int>(means.size()) != classes) {
    throw DomainError("scene needs exactly one mean per class");
  }
  const auto mu = class_means();
  for (double m : mu) {
    if (!(m > 0.0 && m < 1.0)) throw DomainError("scene class means must lie in (0,1)");
  }
  if (std::set<double>(mu.begin(), mu.end()).size() != mu.size()) {
    throw DomainError("scene class means must be distinct");
  }
}

LabeledImage gen_scene(const SceneSpec& spec) {
  spec.validate();
  LabelMap labels(spec.height, spec.width, 0);
  switch (spec.layout) {
    case Layout::stripes:
      for (int y = 0; y < spec.height; ++y) {
        const auto label = static_cast<Label>(static_cast<long>(y) * spec.classes / spec.height);
        for (int x = 0; x < spec.width; ++x) labels.at(y, x) = label;
      }
      break;
    case Layout::checkerboard:
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          labels.at(y, x) = static_cast<Label>((y / spec.cell + x / spec.cell) % spec.classes);
        }
      }
      break;
    case Layout::disks:
      paint_disks(labels, spec);
      break;
  }

  const auto mu = spec.class_means();
  const std::uint64_t key = rng::derive(spec.seed, kPixelStream);
  Image image(spec.height, spec.width, spec.channels);
  auto values = image.values();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int c = 0; c < spec.channels; ++c) {
      const std::size_t idx = i * spec.channels + c;
      const double v = mu[labels[i]] + spec.component_std * rng::keyed_normal(key, idx);
      values[idx] = std::clamp(v, 0.0, 1.0);
    }
  }
  return {std::move(image), std::move(labels), spec};
}

}  // namespace segcert::data
