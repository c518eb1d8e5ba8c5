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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "segcert/image.hpp"

namespace segcert::data {

enum class Layout { stripes, disks, checkerboard };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view text);

/// Synthetic scene with known class-conditional pixel statistics.
struct SceneSpec {
  int height = 64;
  int width = 64;
  int classes = 4;
  Layout layout = Layout::stripes;
  std::vector<double> means;  // one per class; empty -> evenly spaced by `gap`
  double gap = 0.3;
  double component_std = 0.05;
  int channels = 1;
  int cell = 16;  // checkerboard cell size in pixels
  std::uint64_t seed = 0;

  /// Means centred on 0.5 and spaced by `gap`: 0.5 + (c - (K-1)/2) * gap.
  static std::vector<double> spaced_means(int classes, double gap);

  /// `means` if given, otherwise spaced_means(classes, gap).
  std::vector<double> class_means() const;
  double min_gap() const;
  void validate() const;
};

struct LabeledImage {
  Image image;
  LabelMap labels;
  SceneSpec spec;
};

/// Deterministic in `spec`: the layout depends on (layout, seed) and each
/// pixel's intensity is mean[label] + N(0, s^2) from a (seed, pixel, channel)
/// keyed stream, clipped to [0,1].
LabeledImage gen_scene(const SceneSpec& spec);

// Portable anymap I/O. Images are read from P2/P3/P5/P6 with maxval in
// [1, 65535] and mapped to [0,1] by maxval division.
Image read_pnm(const std::filesystem::path& path);
Image parse_pnm(std::string_view bytes);

/// Writes P5 (1 channel) or P6 (3 channels) at the given maxval (255 or 65535).
void write_pnm(const std::filesystem::path& path, const Image& image, int maxval = 65535);
std::string encode_pnm(const Image& image, int maxval = 65535);

/// Grayscale P5 with the class id as pixel value and kAbstain stored as 255.
/// Throws DomainError (capacity) when classes > 255.
void write_labels(const std::filesystem::path& path, const LabelMap& labels, int classes);
std::string encode_labels(const LabelMap& labels, int classes);

/// Inverse of write_labels; values >= classes other than 255 are rejected.
LabelMap read_labels(const std::filesystem::path& path, int classes);
LabelMap parse_labels(std::string_view bytes, int classes);

enum class Resample { nearest, bilinear };

/// Output size round(n * scale) per axis, pixel centres at (i + 0.5).
Image resize(const Image& image, double scale, Resample method);
Image resize_to(const Image& image, int height, int width, Resample method);
LabelMap resize_labels(const LabelMap& labels, double scale);
LabelMap resize_labels_to(const LabelMap& labels, int height, int width);

using Rgb = std::array<std::uint8_t, 3>;

/// A palette with `classes` distinct, non-black colours.
std::vector<Rgb> default_palette(int classes);

/// 3-channel rendering: class c -> palette[c], kAbstain -> black.
Image render_segmentation(const LabelMap& labels, const std::vector<Rgb>& palette);

/// Writes bytes to a file, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace segcert::data
