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

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "segcert/data.hpp"
#include "segcert/errors.hpp"

namespace segcert::data {
namespace {

struct Header {
  char kind = 0;  // '2', '3', '5' or '6'
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t raster = 0;  // byte offset of the first sample

  bool binary() const { return kind == '5' || kind == '6'; }
  int channels() const { return (kind == '3' || kind == '6') ? 3 : 1; }
  int sample_bytes() const { return maxval > 255 ? 2 : 1; }
};

class Reader {
 public:
  Reader(std::string_view bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    if (pos_ >= bytes_.size()) throw ParseError(std::string("unexpected end of file, expected ") + what, pos_);
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw ParseError(std::string(what) + " is too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("expected ") + what, start);
    return value;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError("expected one whitespace byte before the raster", pos_);
    }
    ++pos_;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

Header parse_header(std::string_view bytes) {
  if (bytes.empty()) throw ParseError("empty file", 0);
  if (bytes.size() < 2 || bytes[0] != 'P' || std::string_view("2356").find(bytes[1]) == std::string_view::npos) {
    throw ParseError("not a P2/P3/P5/P6 portable anymap", 0);
  }
  Header h;
  h.kind = bytes[1];
  Reader r(bytes, 2);
  const std::size_t width_at = r.pos();
  const long width = r.number("width");
  const long height = r.number("height");
  const std::size_t maxval_at = r.pos();
  const long maxval = r.number("maxval");
  if (width < 1 || height < 1) throw ParseError("image dimensions must be positive", width_at);
  if (maxval < 1 || maxval > 65535) throw ParseError("maxval must lie in [1, 65535]", maxval_at);
  if (h.binary()) r.single_whitespace();
  h.width = static_cast<int>(width);
  h.height = static_cast<int>(height);
  h.maxval = static_cast<int>(maxval);
  h.raster = r.pos();
  return h;
}

// Raw integer samples in raster order.
std::vector<int> read_samples(std::string_view bytes, const Header& h) {
  const std::size_t count = static_cast<std::size_t>(h.width) * h.height * h.channels();
  std::vector<int> samples(count);
  if (h.binary()) {
    const std::size_t need = count * static_cast<std::size_t>(h.sample_bytes());
    if (bytes.size() - h.raster < need) {
      throw ParseError("truncated raster: expected " + std::to_string(need) + " bytes", bytes.size());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.raster);
    for (std::size_t i = 0; i < count; ++i) {
      samples[i] = h.sample_bytes() == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
    }
  } else {
    Reader r(bytes, h.raster);
    for (std::size_t i = 0; i < count; ++i) {
      r.skip_space_and_comments();
      const std::size_t at = r.pos();
      const long v = r.number("sample");
      if (v > h.maxval) throw ParseError("sample exceeds maxval", at);
      samples[i] = static_cast<int>(v);
    }
    return samples;
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (samples[i] > h.maxval) throw ParseError("sample exceeds maxval", h.raster + i * h.sample_bytes());
  }
  return samples;
}

std::string header_text(char kind, int width, int height, int maxval) {
  return "P" + std::string(1, kind) + "\n" + std::to_string(width) + " " + std::to_string(height) +
         "\n" + std::to_string(maxval) + "\n";
}

void append_sample(std::string& out, int value, int maxval) {
  if (maxval > 255) out.push_back(static_cast<char>((value >> 8) & 0xff));
  out.push_back(static_cast<char>(value & 0xff));
}

}  // namespace

Image parse_pnm(std::string_view bytes) {
  const Header h = parse_header(bytes);
  const auto samples = read_samples(bytes, h);
  Image image(h.height, h.width, h.channels());
  auto values = image.values();
  const double scale = 1.0 / static_cast<double>(h.maxval);
  for (std::size_t i = 0; i < samples.size(); ++i) values[i] = samples[i] * scale;
  return image;
}

Image read_pnm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return parse_pnm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.offset());
  }
}

std::string encode_pnm(const Image& image, int maxval) {
  if (image.empty()) throw DomainError("cannot encode an empty image");
  if (maxval != 255 && maxval != 65535) throw DomainError("maxval must be 255 or 65535");
  if (image.channels() != 1 && image.channels() != 3) {
    throw DomainError("portable anymap images need 1 or 3 channels");
  }
  std::string out = header_text(image.channels() == 1 ? '5' : '6', image.width(), image.height(), maxval);
  out.reserve(out.size() + image.size() * (maxval > 255 ? 2 : 1));
  for (double v : image.values()) {
    const double clamped = std::isnan(v) ? 0.0 : std::min(std::max(v, 0.0), 1.0);
    append_sample(out, static_cast<int>(std::lround(clamped * maxval)), maxval);
  }
  return out;
}

void write_pnm(const std::filesystem::path& path, const Image& image, int maxval) {
  write_file(path, encode_pnm(image, maxval));
}

std::string encode_labels(const LabelMap& labels, int classes) {
  if (classes > 255) {
    throw DomainError("label files hold at most 255 classes, got " + std::to_string(classes));
  }
  if (classes < 1) throw DomainError("classes must be positive");
  std::string out = header_text('5', labels.width(), labels.height(), 255);
  for (Label l : labels.values()) {
    if (l == kAbstain) {
      out.push_back(static_cast<char>(255));
    } else if (l >= classes) {
      throw DomainError("label " + std::to_string(l) + " outside [0, " + std::to_string(classes) + ")");
    } else {
      out.push_back(static_cast<char>(l));
    }
  }
  return out;
}

void write_labels(const std::filesystem::path& path, const LabelMap& labels, int classes) {
  write_file(path, encode_labels(labels, classes));
}

LabelMap parse_labels(std::string_view bytes, int classes) {
  const Header h = parse_header(bytes);
  if (h.channels() != 1) throw ParseError("label files must be grayscale", 1);
  if (h.maxval != 255) throw ParseError("label files must use maxval 255", h.raster);
  const auto samples = read_samples(bytes, h);
  LabelMap labels(h.height, h.width);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] == 255) {
      labels[i] = kAbstain;
    } else if (samples[i] >= classes) {
      throw DomainError("label value " + std::to_string(samples[i]) + " at pixel " + std::to_string(i) +
                        " is outside [0, " + std::to_string(classes) + ")");
    } else {
      labels[i] = static_cast<Label>(samples[i]);
    }
  }
  return labels;
}

LabelMap read_labels(const std::filesystem::path& path, int classes) {
  const std::string bytes = read_file(path);
  try {
    return parse_labels(bytes, classes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.offset());
  }
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed", path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace segcert::data
