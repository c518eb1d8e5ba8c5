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

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "segcert/cli.hpp"
#include "segcert/errors.hpp"

namespace {

using segcert::cli::KeyValueConfig;

// Named flags that override one config key each.
struct Override {
  std::string flag;
  std::string key;
  std::string help;
  std::optional<std::string> value;
};

void bind(CLI::App* app, std::vector<Override>& overrides) {
  for (auto& o : overrides) app->add_option(o.flag, o.value, o.help + " (" + o.key + ")");
}

std::vector<Override> smoothing_flags() {
  return {{"--sigma", "smoothing.sigma", "noise std in pixel units", {}},
          {"--n0", "smoothing.n0", "selection draws", {}},
          {"--n", "smoothing.n", "estimation draws", {}},
          {"--alpha", "smoothing.alpha", "family-wise error level", {}},
          {"--tau", "smoothing.tau", "per-pixel threshold", {}},
          {"--denoise", "smoothing.denoise", "off, single_step or multi_step", {}},
          {"--scale", "smoothing.scale", "working resolution factor", {}},
          {"--model", "model.type", "band, oracle or constant", {}},
          {"--image", "input.image", "input PNM", {}},
          {"--labels", "input.labels", "ground-truth label PGM", {}},
          {"--pool-radius", "denoiser.pool_radius", "denoiser window radius", {}},
          {"--T", "diffusion.T", "diffusion steps", {}},
          {"--beta-start", "diffusion.beta_start", "first beta", {}},
          {"--beta-end", "diffusion.beta_end", "last beta", {}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified segmentation under randomized smoothing"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> seed;
  std::optional<std::string> threads;
  std::string out = "out";
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads for Monte Carlo draws and trials");
  app.add_option("--out", out, "output directory");
  app.add_option("--set", sets, "override a config key: section.key=value");

  std::vector<Override> gen_flags = {{"--height", "scene.height", "image height", {}},
                                     {"--width", "scene.width", "image width", {}},
                                     {"--classes", "scene.classes", "class count", {}},
                                     {"--layout", "scene.layout", "stripes, disks or checkerboard", {}},
                                     {"--gap", "scene.gap", "spacing of class means", {}},
                                     {"--std", "scene.std", "within-class std", {}},
                                     {"--channels", "scene.channels", "1 or 3", {}}};
  std::vector<Override> certify_flags = smoothing_flags();
  std::vector<Override> sweep_flags = smoothing_flags();
  sweep_flags.push_back({"--sigmas", "sweep.sigmas", "comma-separated sigma list", {}});
  sweep_flags.push_back({"--modes", "sweep.modes", "comma-separated denoise modes", {}});
  sweep_flags.push_back({"--scales", "sweep.scales", "comma-separated scales", {}});
  std::vector<Override> eval_flags = {{"--pred", "eval.pred", "predicted label PGM", {}},
                                      {"--gt", "eval.gt", "ground-truth label PGM", {}},
                                      {"--classes", "eval.classes", "class count", {}}};
  std::vector<Override> render_flags = {{"--labels", "render.labels", "label PGM", {}},
                                        {"--output", "render.output", "output PPM", {}},
                                        {"--classes", "render.classes", "class count", {}}};
  std::vector<Override> timestep_flags = {{"--sigma", "smoothing.sigma", "noise std", {}},
                                          {"--T", "diffusion.T", "diffusion steps", {}},
                                          {"--beta-start", "diffusion.beta_start", "first beta", {}},
                                          {"--beta-end", "diffusion.beta_end", "last beta", {}}};
  std::vector<Override> fwer_flags = {{"--pixels", "fwer.pixels", "pixels per trial", {}},
                                      {"--n", "fwer.n", "estimation draws", {}},
                                      {"--n0", "fwer.n0", "selection draws", {}},
                                      {"--tau", "fwer.tau", "threshold", {}},
                                      {"--alpha", "fwer.alpha", "family-wise error level", {}},
                                      {"--p-true", "fwer.p_true", "true-class probability", {}},
                                      {"--trials", "fwer.trials", "trial count", {}},
                                      {"--classes", "fwer.classes", "class count (>= 3)", {}}};

  using Runner = std::function<void(const KeyValueConfig&, const std::filesystem::path&)>;
  std::vector<std::pair<CLI::App*, std::pair<std::vector<Override>*, Runner>>> commands;
  auto add = [&](const char* name, const char* help, std::vector<Override>& flags, Runner run) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    bind(sub, flags);
    commands.push_back({sub, {&flags, std::move(run)}});
  };
  add("gen", "generate a synthetic labelled scene", gen_flags,
      [](const auto& c, const auto& o) { segcert::cli::cmd_gen(c, o, std::cout); });
  add("certify", "certify one image", certify_flags,
      [](const auto& c, const auto& o) { segcert::cli::cmd_certify(c, o, std::cout); });
  add("sweep", "certify over a list of sigmas", sweep_flags,
      [](const auto& c, const auto& o) { segcert::cli::cmd_sweep(c, o, std::cout); });
  add("eval", "score a label map against ground truth", eval_flags,
      [](const auto& c, const auto& o) { segcert::cli::cmd_eval(c, o, std::cout); });
  add("render", "colour a label map", render_flags,
      [](const auto& c, const auto& o) { segcert::cli::cmd_render(c, o, std::cout); });
  add("timestep", "print the diffusion timestep for a sigma", timestep_flags,
      [](const auto& c, const auto&) { segcert::cli::cmd_timestep(c, std::cout); });
  add("fwer-sim", "family-wise error simulation on the oracle channel", fwer_flags,
      [](const auto& c, const auto& o) { segcert::cli::cmd_fwer_sim(c, o, std::cout); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    KeyValueConfig config = config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(config_path);
    if (seed) {
      for (const char* key : {"seed", "scene.seed", "smoothing.seed", "fwer.seed"}) config.set(key, *seed);
    }
    if (threads) {
      config.set("smoothing.threads", *threads);
      config.set("fwer.threads", *threads);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw segcert::ConfigError("--set expects key=value, got '" + s + "'");
      config.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (auto& [sub, entry] : commands) {
      if (!sub->parsed()) continue;
      for (const auto& o : *entry.first) {
        if (o.value) config.set(o.key, *o.value);
      }
      entry.second(config, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "segcert: " << e.what() << "\n";
    return segcert::cli::exit_code_for(e);
  }
  return 0;
}
