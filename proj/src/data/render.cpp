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

#include <cmath>
#include <string>

#include "segcert/data.hpp"
#include "segcert/errors.hpp"

namespace segcert::data {

std::vector<Rgb> default_palette(int classes) {
  if (classes < 1) throw DomainError("palette needs at least one class");
  static constexpr Rgb kBase[] = {{230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},
                                  {245, 130, 48}, {145, 30, 180}, {70, 240, 240}, {240, 50, 230},
                                  {210, 245, 60}, {250, 190, 212}, {0, 128, 128}, {220, 190, 255}};
  std::vector<Rgb> palette;
  palette.reserve(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    if (c < static_cast<int>(std::size(kBase))) {
      palette.push_back(kBase[c]);
      continue;
    }
    // golden-angle hues past the fixed set, kept bright
    const double hue = std::fmod(c * 137.50776, 360.0) / 60.0;
    const double f = hue - std::floor(hue);
    const auto hi = static_cast<std::uint8_t>(235);
    const auto lo = static_cast<std::uint8_t>(60);
    const auto up = static_cast<std::uint8_t>(lo + f * (hi - lo));
    const auto down = static_cast<std::uint8_t>(hi - f * (hi - lo));
    switch (static_cast<int>(hue) % 6) {
      case 0: palette.push_back({hi, up, lo}); break;
      case 1: palette.push_back({down, hi, lo}); break;
      case 2: palette.push_back({lo, hi, up}); break;
      case 3: palette.push_back({lo, down, hi}); break;
      case 4: palette.push_back({up, lo, hi}); break;
      default: palette.push_back({hi, lo, down}); break;
    }
  }
  return palette;
}

Image render_segmentation(const LabelMap& labels, const std::vector<Rgb>& palette) {
  Image out(labels.height(), labels.width(), 3);
  auto values = out.values();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label l = labels[i];
    if (l == kAbstain) continue;
    if (l >= palette.size()) {
      throw DomainError("palette has " + std::to_string(palette.size()) + " colours but label " +
                        std::to_string(l) + " needs more");
    }
    for (int c = 0; c < 3; ++c) values[i * 3 + c] = palette[l][c] / 255.0;
  }
  return out;
}

}  // namespace segcert::data
