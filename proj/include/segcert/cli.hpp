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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "segcert/data.hpp"
#include "segcert/diffusion.hpp"
#include "segcert/models.hpp"
#include "segcert/smoothing.hpp"
#include "segcert/verification.hpp"

namespace segcert::cli {

/// Flat `key = value` text with `[section]` headers; a key inside [scene]
/// is addressed as "scene.key". '#' and ';' start comments. Every lookup,
/// including ones that fall back to a default, is recorded so the resolved
/// configuration can be echoed and replayed.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, const std::string& origin = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  int require_int(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  /// Comma-separated list; an empty value is an empty list.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Every key read so far with the value actually used, grouped by section.
  std::string echo() const;

 private:
  std::optional<std::string> lookup(const std::string& key) const;
  void record(const std::string& key, const std::string& value) const;

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> used_;
};

std::string format_double(double v);

enum class ModelKind { band, oracle, constant };

/// Everything a certify run needs, resolved from a KeyValueConfig.
struct RunConfig {
  data::SceneSpec scene;
  smoothing::SmoothingConfig smoothing;
  diffusion::ScheduleParams schedule;
  ModelKind model = ModelKind::band;
  std::vector<double> model_means;  // band segmenter and denoiser prior
  double model_std = 0.05;
  int model_classes = 0;
  Label constant_label = 0;
  double oracle_p_true = 0.9;
  std::uint64_t oracle_seed = 0;
  int pool_radius = 3;
  std::string input_image;   // empty: generate from [scene]
  std::string input_labels;  // empty: scene labels when generated

  static RunConfig resolve(const KeyValueConfig& config);
};

std::string_view to_string(ModelKind kind);

/// Input image plus ground truth when one is available.
struct RunInput {
  Image image;
  std::optional<LabelMap> truth;
};

RunInput load_input(const RunConfig& run);
std::unique_ptr<models::SegmentationModel> make_model(const RunConfig& run, const RunInput& input);

/// -log10(pv) * 1000 per pixel, clamped to 65535, as a 16-bit single channel image.
Image pvalue_map(const std::vector<double>& pvalues, int height, int width);

// Commands. Each writes its files under `out` and its summary to `log`.
void cmd_gen(const KeyValueConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_certify(const KeyValueConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_sweep(const KeyValueConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_eval(const KeyValueConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_render(const KeyValueConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_timestep(const KeyValueConfig& config, std::ostream& log);
void cmd_fwer_sim(const KeyValueConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Maps an in-flight exception to the documented exit code (2, 3, 4; 1 otherwise).
int exit_code_for(const std::exception& e);

}  // namespace segcert::cli
