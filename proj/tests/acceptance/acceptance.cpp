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

// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "segcert/data.hpp"
#include "segcert/diffusion.hpp"
#include "segcert/models.hpp"
#include "segcert/smoothing.hpp"
#include "segcert/stats.hpp"

using namespace segcert;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path workdir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "segcert_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI and returns (exit code, stdout).
std::pair<int, std::string> cli(const std::string& args) {
  const std::string cmd = std::string(SEGCERT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

Outcome radius_reproduction() {
  const auto out = workdir("radius");
  const auto [code, text] = cli("--out " + out.string() + " sweep --model constant --tau 0.75 --sigmas 0.25,0.5,1.0");
  if (code != 0) return {false, "sweep exited " + std::to_string(code) + ": " + text};
  const auto rows = csv_rows(data::read_file(out / "metrics.csv"));
  const double expected[] = {0.17, 0.34, 0.67};
  if (rows.size() != 3) return {false, "expected 3 rows"};
  bool ok = true;
  std::string detail = "R =";
  for (int i = 0; i < 3; ++i) {
    const double r = std::stod(rows[i][1]);
    ok = ok && std::fabs(r - expected[i]) <= 0.005;
    detail += " " + fmt(r);
  }
  return {ok, detail + " (expected 0.17, 0.34, 0.67 +- 0.005)"};
}

Outcome timestep_anchor() {
  const auto [code, text] = cli("timestep --sigma 1.0");
  const bool printed = code == 0 && text == "258\n";
  const auto calls_per_draw = [](const std::string& mode) {
    const auto out = workdir("timestep_" + mode);
    const auto [c, t] = cli("--out " + out.string() +
                            " certify --sigma 1.0 --n0 1 --n 2 --denoise " + mode +
                            " --set scene.height=8 --set scene.width=8");
    if (c != 0) return std::string("error: ") + t;
    return key_values(data::read_file(out / "run.log"))["denoiser_calls_per_draw"];
  };
  const std::string multi = calls_per_draw("multi_step");
  const std::string single = calls_per_draw("single_step");
  const bool ok = printed && multi == "258" && single == "1";
  return {ok, "timestep prints " + (printed ? std::string("258") : "'" + text + "'") +
                  "; denoiser calls per draw: multi_step " + multi + ", single_step " + single};
}

Outcome fwer_soundness() {
  const auto out = workdir("fwer");
  const auto [code, text] = cli("--out " + out.string() +
                                " --seed 2024 fwer-sim --pixels 256 --n 100 --n0 10 --tau 0.75 --alpha 0.05"
                                " --p-true 0.75 --trials 1000");
  if (code != 0) return {false, "fwer-sim exited " + std::to_string(code) + ": " + text};
  const auto kv = key_values(data::read_file(out / "summary.txt"));
  const double fwer = std::stod(kv.at("fwer"));
  const bool ok = fwer <= 0.0707;
  return {ok, "empirical FWER " + fmt(fwer) + " (" + kv.at("errors") + "/1000, SE " +
                  fmt(std::stod(kv.at("standard_error"))) + ") <= 0.0707"};
}

Outcome pvalue_oracle() {
  double worst = 0.0;
  int cases = 0;
  for (double tau : {0.5, 0.75, 0.9}) {
    for (int n = 1; n <= 12; ++n) {
      for (int k = 0; k <= n; ++k) {
        worst = std::max(worst, std::fabs(stats::binomial_tail_pvalue(k, n, tau) - oracle::binomial_upper_tail(k, n, tau)));
        ++cases;
      }
    }
  }
  const double closed = std::pow(0.75, 100);
  const double got = stats::binomial_tail_pvalue(100, 100, 0.75);
  const double rel = std::fabs(got - closed) / closed;
  const bool ok = worst <= 1e-12 && rel <= 1e-9;
  return {ok, std::to_string(cases) + " grid cases, max abs error " + sci(worst) + "; (100,100,0.75) = " +
                  sci(got) + ", rel error " + sci(rel)};
}

Outcome holm_oracle() {
  const std::vector<double> levels{0.0, 0.005, 0.01, 0.0125, 0.0167, 0.025, 0.05, 0.2, 1.0};
  const double alpha = 0.05;
  std::size_t vectors = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= levels.size();
    std::vector<double> pv(n);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i) {
        pv[i] = levels[c % levels.size()];
        c /= levels.size();
      }
      if (stats::holm_correct(pv, alpha).reject != oracle::holm(pv, alpha)) return {false, "grid mismatch"};
      ++vectors;
    }
  }
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> pv(1 + gen() % 20);
    for (auto& p : pv) p = std::pow(u(gen), 3.0) * 0.1;
    if (stats::holm_correct(pv, alpha).reject != oracle::holm(pv, alpha)) return {false, "random mismatch"};
  }
  return {true, std::to_string(vectors) + " exhaustive vectors (N <= 6) and 10000 random vectors (N <= 20) match exactly"};
}

Outcome constant_smoke() {
  const auto out = workdir("smoke");
  const auto [code, text] = cli("--out " + out.string() +
                                " certify --model constant --sigma 0.25 --n0 10 --n 100 --alpha 0.001 --tau 0.75"
                                " --set scene.height=64 --set scene.width=64");
  if (code != 0) return {false, "certify exited " + std::to_string(code) + ": " + text};
  const auto labels = data::read_labels(out / "certified.pgm", 4);
  std::size_t certified = 0;
  for (Label l : labels.values()) certified += l != kAbstain;
  auto kv = key_values(data::read_file(out / "run.log"));
  const bool ok = certified == 4096 && kv["abstentions"] == "0";
  return {ok, std::to_string(certified) + "/4096 pixels certified, " + kv["abstentions"] + " abstentions"};
}

Outcome denoising_benefit() {
  const std::vector<double> means{0.2, 0.5, 0.8};
  const auto schedule = diffusion::DiffusionSchedule::linear(1000, 1e-4, 0.02);
  const models::BandSegmenter band(means, 0.05);
  const diffusion::MixtureDenoiser denoiser(diffusion::Mixture::uniform(means, 0.05), 3);
  bool ok = true;
  std::string detail;
  double gain_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    data::SceneSpec spec{.height = 64, .width = 64, .classes = 3, .layout = data::Layout::stripes,
                         .means = means, .component_std = 0.05, .seed = seed};
    const auto scene = data::gen_scene(spec);
    smoothing::SmoothingConfig cfg;
    cfg.sigma = 0.5;
    cfg.n0 = 10;
    cfg.n = 100;
    cfg.significance = {0.001, 0.75};
    cfg.seed = seed;
    auto acc = [&](smoothing::DenoiseMode mode) {
      cfg.denoising = mode;
      const auto r = smoothing::seg_certify(band, {&denoiser, &schedule}, scene.image, cfg);
      std::size_t hit = 0;
      for (std::size_t i = 0; i < r.labels.size(); ++i) hit += r.labels[i] == scene.labels[i];
      return static_cast<double>(hit) / r.labels.size();
    };
    const double plain = acc(smoothing::DenoiseMode::off);
    const double denoised = acc(smoothing::DenoiseMode::single_step);
    ok = ok && denoised > plain;
    gain_sum += denoised - plain;
    detail += "seed " + std::to_string(seed) + ": " + fmt(plain, 3) + " -> " + fmt(denoised, 3) + "; ";
  }
  return {ok, detail + "mean gain " + fmt(gain_sum / 5, 3)};
}

Outcome determinism() {
  const std::string common =
      " certify --sigma 0.5 --denoise single_step --n 60 --set scene.height=32 --set scene.width=32";
  std::vector<fs::path> dirs;
  for (const char* run : {"a4", "b4", "c1"}) {
    const auto out = workdir(std::string("det_") + run);
    const std::string threads = run[1] == '4' ? "4" : "1";
    const auto [code, text] = cli("--out " + out.string() + " --seed 5 --threads " + threads + common);
    if (code != 0) return {false, "certify exited " + std::to_string(code) + ": " + text};
    dirs.push_back(out);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const auto name = entry.path().filename();
    if (data::read_file(dirs[0] / name) != data::read_file(dirs[1] / name)) {
      return {false, name.string() + " differs between identical runs"};
    }
    ++files;
  }
  for (const char* name : {"certified.pgm", "pvalues.pgm", "metrics.csv", "run.log"}) {
    if (data::read_file(dirs[0] / name) != data::read_file(dirs[2] / name)) {
      return {false, std::string(name) + " differs between 4 threads and 1 thread"};
    }
  }
  return {true, std::to_string(files) + " files byte-identical across repeated 4-thread runs; outputs match the 1-thread run"};
}

Outcome cohen_reference() {
  const std::vector<std::uint32_t> c0{10, 0};
  const auto cert = smoothing::cohen_certify_pixel(c0, std::vector<std::uint32_t>{100, 0}, 10, 100, 0.001, 0.25);
  bool abstains = true;
  for (std::uint32_t k = 0; k <= 50; ++k) {
    const auto c = smoothing::cohen_certify_pixel(c0, std::vector<std::uint32_t>{k, 100 - k}, 10, 100, 0.001, 0.25);
    abstains = abstains && c.label == kAbstain;
  }
  const bool ok = cert.label == 0 && std::fabs(cert.radius - 0.3753) <= 0.0005 && abstains;
  return {ok, "radius " + fmt(cert.radius, 6) + " (0.3753 +- 0.0005); abstains for all k <= 50: " +
                  (abstains ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds;  // 0: no limit
  };
  const std::vector<Criterion> criteria = {
      {"1 radius reproduction", radius_reproduction, 1.0},
      {"2 timestep anchor", timestep_anchor, 1.0},
      {"3 FWER soundness", fwer_soundness, 300.0},
      {"4 p-value oracle", pvalue_oracle, 0.0},
      {"5 Holm oracle", holm_oracle, 0.0},
      {"6 constant-model smoke", constant_smoke, 5.0},
      {"7 denoising benefit", denoising_benefit, 0.0},
      {"8 determinism", determinism, 0.0},
      {"9 Cohen reference", cohen_reference, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt(c.limit_seconds, 0) + " s limit";
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt(secs, 2) << " s]\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
